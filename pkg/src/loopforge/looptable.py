"""Generic finite-loop machinery over explicit Cayley tables.

Everything here works on element indices of a CayleyTable: validation,
subloop generation, normality, quotients, loop identities, and an
isomorphism / automorphism search by generator-image backtracking.  Tables
built by cd_table carry their dimension n, which unlocks sign-based pruning
in the automorphism search; all other operations are table-generic.
"""

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import cdcore

CD_TABLE_MAX_N = 12


def _table_dtype(m):
    return np.int16 if m <= (1 << 15) else np.int32


@dataclass
class CayleyTable:
    """Full multiplication table over element indices."""

    table: np.ndarray
    identity: int = 0
    n: Optional[int] = None  # set when built by cd_table
    labels: Optional[list] = None

    def __post_init__(self):
        self.table = np.ascontiguousarray(self.table)
        self.table.setflags(write=False)

    @property
    def size(self):
        return self.table.shape[0]

    def mul(self, x, y):
        return int(self.table[x, y])

    def rows(self):
        return self.table.tolist()


@lru_cache(maxsize=None)
def cd_table(n):
    """The 2^{n+1} x 2^{n+1} table of Q_n under index = sign*2^n + exps."""
    if not 0 <= n <= CD_TABLE_MAX_N:
        raise ValueError(f"n must be in [0, {CD_TABLE_MAX_N}], got {n}")
    half = 1 << n
    m = half << 1
    neg = cdcore.sign_table(n).neg
    exps = np.arange(half)
    xor = exps[:, None] ^ exps[None, :]
    quarter = xor + (half * neg)
    block = np.empty((m, m), dtype=_table_dtype(m))
    block[:half, :half] = quarter
    block[:half, half:] = quarter ^ half  # (+x)(-y) = -(xy)
    block[half:, :half] = quarter ^ half
    block[half:, half:] = quarter
    labels = [cdcore.format_element(cdcore.from_index(n, k)) for k in range(m)]
    return CayleyTable(block, identity=0, n=n, labels=labels)


@dataclass
class LoopCheck:
    ok: bool
    reason: Optional[str] = None
    witness: Optional[tuple] = None


def validate_loop(t):
    """Latin-square rows/columns plus a two-sided identity."""
    m = t.size
    ref = np.arange(m)
    for axis, what in ((1, "row"), (0, "column")):
        sorted_lines = np.sort(t.table, axis=axis)
        bad = np.nonzero((sorted_lines != (ref[None, :] if axis == 1 else ref[:, None])).any(axis=axis))[0]
        if bad.size:
            return LoopCheck(False, f"{what} is not a permutation", (what, int(bad[0])))
    e = t.identity
    if not (np.array_equal(t.table[e], ref) and np.array_equal(t.table[:, e], ref)):
        return LoopCheck(False, "identity fails", (e,))
    return LoopCheck(True)


# ---------------------------------------------------------------------------
# Subloops.

@dataclass(frozen=True)
class Subloop:
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def __contains__(self, k):
        return k in self.elements

    def __iter__(self):
        return iter(self.elements)


def _division_tables(t):
    m = t.size
    left = np.empty((m, m), dtype=t.table.dtype)   # left[a, b] = x with a*x = b
    right = np.empty((m, m), dtype=t.table.dtype)  # right[a, b] = y with y*a = b
    rows = t.table
    arange = np.arange(m)
    for a in range(m):
        left[a, rows[a]] = arange
        right[a, rows[:, a]] = arange
    return left, right


def generate_subloop(t, gens):
    """Least subset containing gens and the identity, closed under product
    and both divisions (worklist closure)."""
    left, right = _cached_divisions(t)
    table = t.table
    members = {t.identity}
    work = [t.identity]
    for g in gens:
        g = int(g)
        if g not in members:
            members.add(g)
            work.append(g)
    known = list(members)
    while work:
        x = work.pop()
        for y in list(known):
            for z in (table[x, y], table[y, x], left[x, y], right[x, y],
                      left[y, x], right[y, x]):
                z = int(z)
                if z not in members:
                    members.add(z)
                    work.append(z)
                    known.append(z)
    return Subloop(tuple(sorted(members)))


def _cached_divisions(t):
    if not hasattr(t, "_divisions"):
        t._divisions = _division_tables(t)
    return t._divisions


def subloop_table(t, s):
    """Reindexed CayleyTable of a subloop (identity first)."""
    order = sorted(s.elements, key=lambda k: (k != t.identity, k))
    pos = {k: i for i, k in enumerate(order)}
    m = len(order)
    sub = np.empty((m, m), dtype=t.table.dtype)
    for i, a in enumerate(order):
        for j, b in enumerate(order):
            sub[i, j] = pos[int(t.table[a, b])]
    labels = [t.labels[k] for k in order] if t.labels else None
    return CayleyTable(sub, identity=0, labels=labels)


def list_subloops(t):
    """All subloops, by lattice growth: extend each known subloop by one
    outside element and close.  Every subloop of a finite loop arises."""
    trivial = generate_subloop(t, ())
    seen = {trivial.elements: trivial}
    frontier = [trivial]
    while frontier:
        grown = []
        for s in frontier:
            inside = set(s.elements)
            for x in range(t.size):
                if x not in inside:
                    bigger = generate_subloop(t, s.elements + (x,))
                    if bigger.elements not in seen:
                        seen[bigger.elements] = bigger
                        grown.append(bigger)
        frontier = grown
    return sorted(seen.values(), key=lambda s: (len(s), s.elements))


def classify_pair(x, y):
    """Subgroup type generated by a pair: R2, C4, or H8."""
    cdcore._check_dims(x, y)
    x_central = x.exps == 0
    y_central = y.exps == 0
    if x_central and y_central:
        return "R2"
    if x_central or y_central or x.exps == y.exps:
        return "C4"
    return "H8"


def classify_subloop16(t, s):
    """O16 when isomorphic to the octonion table cd_table(3), else QuasiO16."""
    if len(s) != 16:
        raise ValueError(f"subloop has size {len(s)}, need 16")
    return "O16" if isomorphic(cd_table(3), subloop_table(t, s)) else "QuasiO16"


def is_normal(t, s):
    """xS = Sx, (xS)y = x(Sy), x(yS) = (xy)S for all x, y."""
    table = t.table
    m = t.size
    idx = np.fromiter(s.elements, dtype=int)
    left_cosets = [frozenset(int(v) for v in table[x, idx]) for x in range(m)]
    right_cosets = [frozenset(int(v) for v in table[idx, x]) for x in range(m)]
    for x in range(m):
        if left_cosets[x] != right_cosets[x]:
            return False
    for x in range(m):
        xS = np.array(sorted(left_cosets[x]))
        for y in range(m):
            if frozenset(int(v) for v in table[xS, y]) != frozenset(
                int(v) for v in table[x, table[y, idx]]
            ):
                return False
            if frozenset(int(v) for v in table[x, table[idx, y]]) != frozenset(
                int(v) for v in table[table[x, y], idx]
            ):
                return False
    return True


def is_hamiltonian(t):
    return all(is_normal(t, s) for s in list_subloops(t))


def center(t):
    """Elements commuting and associating (all three slots) with everything."""
    table = t.table
    m = t.size
    X = np.arange(m)
    members = []
    for a in range(m):
        if not np.array_equal(table[a], table[:, a]):
            continue
        a_xy = table[a][table]                   # a(xy)
        ax_y = table[table[a]]                   # (ax)y
        x_ay = table[:, table[a]]                # x(ay)
        xa_y = table[table[:, a]]                # (xa)y
        xy_a = table[:, a][table]                # (xy)a
        x_ya = table[X[:, None], table[:, a][None, :]]  # x(ya)
        if (
            np.array_equal(a_xy, ax_y)
            and np.array_equal(x_ay, xa_y)
            and np.array_equal(xy_a, x_ya)
        ):
            members.append(a)
    return Subloop(tuple(members))


def quotient_by_signs(t):
    """Collapse classes {x, -x} of a CD table; result is (Z_2)^n."""
    if t.n is None:
        raise ValueError("quotient_by_signs needs a table built by cd_table")
    half = 1 << t.n
    cls = np.asarray(t.table) & (half - 1)
    # well-definedness: the class of a product must not depend on representatives
    if not (
        np.array_equal(cls[:half, :half], cls[half:, :half])
        and np.array_equal(cls[:half, :half], cls[:half, half:])
        and np.array_equal(cls[:half, :half], cls[half:, half:])
    ):
        raise ValueError("table is not compatible with sign classes")
    labels = [t.labels[u] for u in range(half)] if t.labels else None
    return CayleyTable(cls[:half, :half].copy(), identity=0, labels=labels)


# ---------------------------------------------------------------------------
# Loop identities.

@dataclass
class IdentityPredicates:
    moufang: bool
    diassociative: bool
    inverse_property: bool
    power_assoc: bool


def _is_associative_on(table, idx):
    for x in idx:
        for y in idx:
            xy = table[x, y]
            for z in idx:
                if table[xy, z] != table[x, table[y, z]]:
                    return False
    return True


def identity_predicates(t):
    table = t.table
    m = t.size
    X = np.arange(m)
    xz = table                               # (x, z) -> xz
    y_xz = table[X[None, :, None], xz[:, None, :]]        # (x, y, z) -> y(xz)
    lhs = table[X[:, None, None], y_xz]                   # x(y(xz))
    xyx = table[table, X[:, None]]                        # (x, y) -> (xy)x
    rhs = table[xyx]                                      # ((xy)x)z
    moufang = bool(np.array_equal(lhs, rhs))

    diassociative = True
    seen_pairs = set()
    for x in range(m):
        for y in range(m):
            s = generate_subloop(t, (x, y)).elements
            if s in seen_pairs:
                continue
            seen_pairs.add(s)
            if not _is_associative_on(table, s):
                diassociative = False
    power_assoc = all(
        _is_associative_on(table, generate_subloop(t, (x,)).elements)
        for x in range(m)
    )

    left, right = _cached_divisions(t)
    lam = right[:, t.identity]  # x^lambda * x = e
    rho = left[:, t.identity]   # x * x^rho = e
    want_y = np.broadcast_to(X[None, :], (m, m))
    lam_ok = np.array_equal(table[lam[:, None], table], want_y)          # x^l(xy) = y
    rho_ok = np.array_equal(table[table.T, rho[:, None]], want_y)        # (yx)x^r = y
    return IdentityPredicates(moufang, diassociative, bool(lam_ok and rho_ok), power_assoc)


# ---------------------------------------------------------------------------
# Isomorphism and automorphism search.

@dataclass(frozen=True)
class LoopMap:
    images: tuple

    def is_homomorphism(self, a, b):
        ta, tb = a.table, b.table
        f = np.asarray(self.images)
        return bool(np.array_equal(f[ta], tb[f[:, None], f[None, :]]))


def _element_orders(t):
    table = t.table.tolist()
    e = t.identity
    orders = []
    for x in range(t.size):
        k, acc = 1, x
        while acc != e:
            acc = table[acc][x]
            k += 1
        orders.append(k)
    return orders


def _generating_sequence(t):
    gens = []
    have = generate_subloop(t, ())
    while len(have) < t.size:
        nxt = min(x for x in range(t.size) if x not in have)
        gens.append(nxt)
        have = generate_subloop(t, tuple(have.elements) + (nxt,))
    return gens


def _cd_sign_prune(n):
    """For cd tables: candidate generator images must reproduce the
    commutator/associator signs of the canonical generators."""

    def exps(k):
        return k & ((1 << n) - 1)

    def ok(gens_src, gens_img, cand_src, cand_img):
        cu = exps(cand_src)
        cv = exps(cand_img)
        for j, (s, i) in enumerate(zip(gens_src, gens_img)):
            if cdcore.comm_sign(n, exps(s), cu) != cdcore.comm_sign(n, exps(i), cv):
                return False
            for s2, i2 in zip(gens_src[j + 1 :], gens_img[j + 1 :]):
                if cdcore.assoc_sign(n, exps(s), exps(s2), cu) != cdcore.assoc_sign(
                    n, exps(i), exps(i2), cv
                ):
                    return False
        return True

    return ok


def _search_maps(a, b, find_all, limit=None):
    """Backtracking over generator images with incremental consistency.

    The partial map is always defined on the subloop generated by the placed
    generators; placing a new image extends it by a worklist of forced
    products and fails fast on the first clash.
    """
    ta = a.table.tolist()
    tb = b.table.tolist()
    m = a.size
    if b.size != m:
        return []
    orders_a = _element_orders(a)
    orders_b = _element_orders(b)
    if sorted(orders_a) != sorted(orders_b):
        return []
    gens = _generating_sequence(a)
    prune = _cd_sign_prune(a.n) if (a.n is not None and a is b) else None

    img = [-1] * m
    used = [False] * m
    img[a.identity] = b.identity
    used[b.identity] = True
    dom = [a.identity]
    found = []

    def place(x, y):
        """Map x -> y and close under products; returns the trail to undo,
        or None on contradiction."""
        trail = []

        def assign(u, v):
            if img[u] != -1:
                return img[u] == v
            if used[v]:
                return False
            img[u] = v
            used[v] = True
            dom.append(u)
            trail.append(u)
            return True

        if not assign(x, y):
            return trail, False
        i = 0
        start = len(dom) - len(trail)
        while start + i < len(dom):
            u = dom[start + i]
            fu = img[u]
            for w in list(dom):
                fw = img[w]
                if not assign(ta[u][w], tb[fu][fw]):
                    return trail, False
                if not assign(ta[w][u], tb[fw][fu]):
                    return trail, False
            i += 1
        return trail, True

    def undo(trail):
        for u in trail:
            used[img[u]] = False
            img[u] = -1
            dom.pop()

    def rec(k, placed_src, placed_img):
        if k == len(gens):
            found.append(LoopMap(tuple(img)))
            return limit is not None and len(found) >= limit
        x = gens[k]
        want = orders_a[x]
        for y in range(m):
            if used[y] or orders_b[y] != want:
                continue
            if prune and not prune(placed_src, placed_img, x, y):
                continue
            trail, ok = place(x, y)
            if ok:
                stop = rec(k + 1, placed_src + [x], placed_img + [y])
                undo(trail)
                if stop:
                    return True
                if not find_all:
                    if found:
                        return True
            else:
                undo(trail)
        return False

    rec(0, [], [])
    return found


def isomorphic(a, b):
    """A witness isomorphism a -> b, or None."""
    maps = _search_maps(a, b, find_all=False, limit=1)
    return maps[0] if maps else None


def automorphism_group(t):
    """All product-preserving bijections of t (search cap: size <= 32)."""
    if t.size > 32:
        raise ValueError("automorphism search capped at 32 elements")
    return _search_maps(t, t, find_all=True)


# ---------------------------------------------------------------------------
# Exports.

def table_to_csv(t):
    if t.labels is None:
        raise ValueError("table has no labels")
    lines = [",".join(t.labels)]
    for row in t.table:
        lines.append(",".join(t.labels[int(v)] for v in row))
    return "\n".join(lines) + "\n"


def table_to_json(t):
    return {
        "n": t.n,
        "size": t.size,
        "labels": t.labels,
        "table": [[int(v) for v in row] for row in t.table],
    }


def table_to_json_text(t):
    return json.dumps(table_to_json(t), indent=2) + "\n"
