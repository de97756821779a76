"""Independent oracles used by the tests.

Everything here is deliberately naive and kept separate from the library
code paths it checks: a coordinate-vector Cayley-Dickson multiplication, a
hand-coded quaternion table, set-based group closure, and inversion-count
parity.
"""

import numpy as np


# ---------------------------------------------------------------------------
# Cayley-Dickson algebra on explicit coordinate vectors over Z.
# An element of the n-th algebra is a vector of 2^n integer coordinates;
# (a, b) pairs are the lower and upper halves.  This is the textbook
# doubling formula, independent of any sign-table bookkeeping.

def cd_conj_vec(v):
    v = np.asarray(v)
    if v.shape[0] == 1:
        return v.copy()
    h = v.shape[0] // 2
    return np.concatenate([cd_conj_vec(v[:h]), -v[h:]])


def cd_mul_vec(u, v):
    """(a,b)(c,d) = (ac - d*b, da + bc*)."""
    u, v = np.asarray(u), np.asarray(v)
    if u.shape[0] == 1:
        return u * v
    h = u.shape[0] // 2
    a, b = u[:h], u[h:]
    c, d = v[:h], v[h:]
    return np.concatenate([
        cd_mul_vec(a, c) - cd_mul_vec(cd_conj_vec(d), b),
        cd_mul_vec(d, a) + cd_mul_vec(b, cd_conj_vec(c)),
    ])


def basis_vec(n, exps, sign=0):
    v = np.zeros(1 << n, dtype=np.int64)
    v[exps] = -1 if sign else 1
    return v


def signed_basis_of(v):
    """Return (sign, exps) of a +/- basis vector, failing if it is not one."""
    nz = np.nonzero(v)[0]
    assert len(nz) == 1, f"not a signed basis vector: {v}"
    exps = int(nz[0])
    coeff = int(v[exps])
    assert coeff in (1, -1)
    return (0 if coeff == 1 else 1), exps


# ---------------------------------------------------------------------------
# Hand-coded quaternion group table on labels, mapped to the index layout
# index = sign*4 + exps with exps bit0 <-> i, bit1 <-> j, ij = k.

QUAT_LABELS = ["1", "i", "j", "k", "-1", "-i", "-j", "-k"]

_QUAT_RULES = {
    ("1", "1"): "1", ("1", "i"): "i", ("1", "j"): "j", ("1", "k"): "k",
    ("i", "1"): "i", ("j", "1"): "j", ("k", "1"): "k",
    ("i", "i"): "-1", ("j", "j"): "-1", ("k", "k"): "-1",
    ("i", "j"): "k", ("j", "i"): "-k",
    ("j", "k"): "i", ("k", "j"): "-i",
    ("k", "i"): "j", ("i", "k"): "-j",
}


def _quat_mul_label(a, b):
    sign = a.startswith("-") ^ b.startswith("-")
    r = _QUAT_RULES[(a.lstrip("-"), b.lstrip("-"))]
    if sign:
        r = r[1:] if r.startswith("-") else "-" + r
    return r


def quaternion_table():
    """8x8 index table of the quaternion group (identity at index 0)."""
    idx = {lab: i for i, lab in enumerate(QUAT_LABELS)}
    t = [[idx[_quat_mul_label(a, b)] for b in QUAT_LABELS] for a in QUAT_LABELS]
    return np.array(t)


def cyclic_table(m):
    return np.add.outer(np.arange(m), np.arange(m)) % m


# ---------------------------------------------------------------------------
# Naive permutation helpers.

def naive_mulclose(gens, maxsize=None):
    """Set-based closure; gens are tuples."""
    els = set(gens)
    bdy = list(els)
    while bdy:
        new = []
        for a in gens:
            for b in bdy:
                c = tuple(a[b[z]] for z in range(len(a)))
                if c not in els:
                    els.add(c)
                    new.append(c)
                    if maxsize and len(els) >= maxsize:
                        return els
        bdy = new
    return els


def naive_parity(p):
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inv % 2


def naive_order(p):
    ident = tuple(range(len(p)))
    q = tuple(p)
    k = 1
    while q != ident:
        q = tuple(p[q[z]] for z in range(len(p)))
        k += 1
        assert k <= 2 * len(p) ** 2
    return k


def brute_force_automorphisms(table):
    """All product-preserving bijections, by raw permutation enumeration.

    Only usable for tiny tables (8 elements); counts every f with
    f(xy) = f(x)f(y).
    """
    from itertools import permutations

    t = np.asarray(table)
    m = t.shape[0]
    autos = []
    for p in permutations(range(m)):
        if all(p[t[x, y]] == t[p[x], p[y]] for x in range(m) for y in range(m)):
            autos.append(p)
    return autos
