"""The theorem suite: every structural claim about Inn/Mlt(Q_n), run and
recorded as a VerificationReport.

Checks run in a fixed order; sampled checks draw from a generator seeded by
(seed, check name) so reports are reproducible.  Mode 'exhaustive' (n <= 4)
enumerates Mlt(Q_n) by BFS closure; mode 'rank' (n >= 5) replaces
enumeration with GF(2) rank computations, generator-level identities over
their full quantifier ranges, and >= 10^5 seeded random products where the
group itself is out of reach.
"""

import json
import time
import zlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from . import cdcore, looptable, mltgroups, permgroup
from ._kernels import parity_many
from .mltgroups import (
    CapExceeded,
    build_K,
    build_N,
    inner_generators,
    k_elements,
    mirror_conjugator,
    mlt_group,
    inn_group,
    onesided_inn,
    onesided_mlt,
    resolve_mode,
    translation_generators,
    verify_semidirect,
    verify_semidirect_onesided,
)
from .permgroup import GF2Basis, compose, flip_decompose, invert

SAMPLES = 100_000


class CheckFailed(Exception):
    def __init__(self, message, witness=None, values=None):
        super().__init__(message)
        self.witness = witness
        self.values = values or {}


@dataclass
class CheckResult:
    name: str
    anchor: str
    status: str  # pass | fail | skipped
    values: dict
    witness: Optional[object]
    ms: float


@dataclass
class VerificationReport:
    n: int
    mode: str
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.status == "pass" for c in self.checks)

    @property
    def exit_status(self):
        if any(c.status == "fail" for c in self.checks):
            return 1
        if any(c.status == "skipped" for c in self.checks):
            return 2
        return 0

    def to_json_dict(self, stable=False):
        return {
            "n": self.n,
            "mode": self.mode,
            "seed": self.seed,
            "checks": [
                {
                    "name": c.name,
                    "anchor": c.anchor,
                    "status": c.status,
                    "values": _jsonable(c.values),
                    "witness": _jsonable(c.witness),
                    "ms": 0.0 if stable else round(c.ms, 3),
                }
                for c in self.checks
            ],
        }

    def to_json(self, stable=False):
        return json.dumps(self.to_json_dict(stable=stable), indent=2) + "\n"


def _jsonable(v):
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, permgroup.Permutation):
        return v.to_line()
    return str(v)


# ---------------------------------------------------------------------------
# Context shared across checks.

class SuiteContext:
    def __init__(self, n, mode, cap, seed):
        self.n = n
        self.mode = mode
        self.cap = cap
        self.seed = seed
        self.half = 1 << n
        self.m = 1 << (n + 1)
        self.e_idx = 1 << (n - 1)  # index (= class) of e = i_n
        self.exhaustive = mode == "exhaustive"

    def rng(self, name):
        return np.random.default_rng([self.seed, zlib.crc32(name.encode())])

    @cached_property
    def table(self):
        return looptable.cd_table(self.n).table

    @cached_property
    def gens(self):
        return inner_generators(self.n)

    @cached_property
    def mlt(self):
        return mlt_group(self.n, "exhaustive", cap=self.cap)

    @cached_property
    def inn(self):
        return inn_group(self.n, self.mode, cap=self.cap)

    @cached_property
    def translation_rows(self):
        return np.stack(
            [g.images for g in translation_generators(self.n)]
        ).astype(np.uint8)

    @cached_property
    def left_rows(self):
        return mltgroups._translation_rows(self.n)[0]

    def sampled_mlt_rows(self, count=SAMPLES):
        """count seeded random products of translations (elements of Mlt)."""
        rng = self.rng("sampled-products")
        pool = self.translation_rows
        cur = pool[rng.integers(0, pool.shape[0], count)]
        for step in range(5):
            if step % 2 == 0:
                other = pool[rng.integers(0, pool.shape[0], count)]
            else:
                other = cur[rng.permutation(count)]
            cur = np.take_along_axis(cur, other, axis=1)
        return cur

    def assoc_idx(self, a, b, c):
        """Associator sign (as +/-1 int array) from the index table."""
        t = self.table
        lhs = t[t[a, b], c]
        rhs = t[a, t[b, c]]
        neg = rhs ^ self.half
        if not np.all((lhs == rhs) | (lhs == neg)):
            raise CheckFailed("associator left {1,-1}")
        return np.where(lhs == rhs, 1, -1)

    @cached_property
    def comm_matrix(self):
        sgn = cdcore.sign_table(self.n).matrix.astype(np.int8)
        return sgn * sgn.T


def _flip_pattern(rows):
    """Vectorized flip test: (is_flip per row, flipped-class bool matrix)."""
    m = rows.shape[1]
    half = m // 2
    a = rows[:, :half].astype(np.int32)
    b = rows[:, half:].astype(np.int32)
    ids = np.arange(half)
    fixed = (a == ids) & (b == ids + half)
    flip = (a == ids + half) & (b == ids)
    return np.all(fixed | flip, axis=1), flip


def _bits_of_flip_matrix(flip):
    packed = np.packbits(flip, axis=1, bitorder="little")
    return [int.from_bytes(packed[i].tobytes(), "little") for i in range(flip.shape[0])]


def _all_ones(half):
    return (1 << half) - 1


# ---------------------------------------------------------------------------
# Individual checks.  Each returns a dict of recorded values and raises
# CheckFailed on violation.

def check_even_permutations(ctx):
    if ctx.exhaustive:
        rows = ctx.mlt.closure.elements
        odd = parity_many(rows)
        if odd.any():
            raise CheckFailed("odd permutation in Mlt", witness=ctx.mlt.closure.perm_at(int(np.argmax(odd))))
        return {"elements": len(rows), "range": "full"}
    rows = ctx.translation_rows
    sampled = ctx.sampled_mlt_rows()
    for name, batch in (("generators", rows), ("sampled", sampled)):
        odd = parity_many(np.ascontiguousarray(batch))
        if odd.any():
            raise CheckFailed(f"odd permutation among {name}")
    return {"generators": rows.shape[0], "sampled": sampled.shape[0]}


def _orders_ok(rows):
    ids = np.arange(rows.shape[1], dtype=rows.dtype)
    p2 = np.take_along_axis(rows, rows, axis=1)
    p4 = np.take_along_axis(p2, p2, axis=1)
    ok = np.all(p4 == ids, axis=1)
    o1 = np.all(rows == ids, axis=1)
    o2 = np.all(p2 == ids, axis=1) & ~o1
    dist = {
        "order_1": int(o1.sum()),
        "order_2": int(o2.sum()),
        "order_4": int((ok & ~o1 & ~o2).sum()),
    }
    return ok, dist


def check_element_orders(ctx):
    if ctx.exhaustive:
        ok, dist = _orders_ok(ctx.mlt.closure.elements)
        if not ok.all():
            raise CheckFailed("element of order not in {1,2,4}", witness=ctx.mlt.closure.perm_at(int(np.argmin(ok))))
        dist["range"] = "full"
        return dist
    for name, batch in (("generators", ctx.translation_rows), ("sampled", ctx.sampled_mlt_rows())):
        ok, _ = _orders_ok(batch)
        if not ok.all():
            raise CheckFailed(f"order outside 1/2/4 among {name}")
    return {"generators": ctx.translation_rows.shape[0], "sampled": SAMPLES}


def check_associator_symmetry(ctx):
    m = ctx.m
    idx = np.arange(m)
    if m <= 64:
        X, Y, Z = np.meshgrid(idx, idx, idx, indexing="ij")
        s = ctx.assoc_idx(X, Y, Z)
        if not np.array_equal(s, s.transpose(2, 1, 0)):
            bad = np.argwhere(s != s.transpose(2, 1, 0))[0]
            raise CheckFailed("[x,y,z] != [z,y,x]", witness=[int(v) for v in bad])
        return {"triples": m**3, "range": "full"}
    rng = ctx.rng("assoc-symmetry")
    X, Y, Z = rng.integers(0, m, (3, SAMPLES))
    if not np.array_equal(ctx.assoc_idx(X, Y, Z), ctx.assoc_idx(Z, Y, X)):
        raise CheckFailed("[x,y,z] != [z,y,x] (sampled)")
    return {"triples": SAMPLES, "range": "sampled"}


def check_conjugation_flip_form(ctx):
    half, allones = ctx.half, _all_ones(ctx.half)
    for cls in range(half):
        for x in (cls, cls + half):
            v = flip_decompose(ctx.gens.T[x])
            expect = 0 if cls == 0 else allones ^ 1 ^ (1 << cls)
            if v.bits != expect:
                raise CheckFailed("T_x flip form", witness=x)
    return {"instances": ctx.m, "range": "full"}


def check_conjugation_pair_flips(ctx):
    half = ctx.half
    count = 0
    for cx in range(1, half):
        for cy in range(1, half):
            if cx == cy:
                continue
            v = flip_decompose(compose(ctx.gens.T[cy], ctx.gens.T[cx]))
            if v.bits != (1 << cx) | (1 << cy):
                raise CheckFailed("T_y T_x flip form", witness=(cx, cy))
            count += 1
    return {"instances": count, "range": "full"}


def check_left_inner_e_form(ctx):
    half, allones, e = ctx.half, _all_ones(ctx.half), ctx.e_idx
    for cls in range(half):
        for x in (cls, cls + half):
            v = flip_decompose(ctx.gens.Lxy[x, e])
            if cls in (0, e):
                expect = 0
            else:
                expect = allones ^ 1 ^ (1 << cls) ^ (1 << e) ^ (1 << (cls ^ e))
            if v.bits != expect:
                raise CheckFailed("L_{x,e} flip form", witness=x)
    return {"instances": ctx.m, "range": "full"}


def check_left_inner_pair_e(ctx):
    half, e = ctx.half, ctx.e_idx
    count = 0
    for cx in range(1, half):
        if cx == e:
            continue
        for cy in range(1, half):
            if cy in (e, cx):
                continue
            got = flip_decompose(
                compose(ctx.gens.Lxy[cy, e], ctx.gens.Lxy[cx, e])
            ).bits
            expect = (1 << cx) ^ (1 << cy) ^ (1 << (cx ^ e)) ^ (1 << (cy ^ e))
            if got != expect:
                raise CheckFailed("L_{y,e} L_{x,e} flip form", witness=(cx, cy))
            count += 1
    return {"instances": count, "range": "full"}


def check_left_right_inner_agree(ctx):
    for key in ctx.gens.Lxy:
        if ctx.gens.Lxy[key] != ctx.gens.Rxy[key]:
            raise CheckFailed("L_{x,y} != R_{x,y}", witness=key)
    return {"pairs": len(ctx.gens.Lxy), "range": "full"}


def check_inner_group_structure(ctx):
    n, half = ctx.n, ctx.half
    expected_order = 1 << ((1 << n) - 2)
    values = {"expected_order": expected_order, "expected_rank": (1 << n) - 2}
    rank_basis = mltgroups._inn_flip_basis(n)
    values["generator_rank"] = rank_basis.rank
    if rank_basis.rank != (1 << n) - 2:
        raise CheckFailed("Inn generator flip rank off", values=values)
    if ctx.exhaustive:
        inn = ctx.inn
        rows = inn.closure.elements
        values["order"] = len(rows)
        if len(rows) != expected_order:
            raise CheckFailed("|Inn| off", values=values)
        ok, dist = _orders_ok(rows)
        if not (dist["order_4"] == 0 and ok.all()):
            raise CheckFailed("Inn has an element of order > 2", values=values)
        is_flip, flip = _flip_pattern(rows)
        if not is_flip.all():
            raise CheckFailed("Inn element is not a sign flip", values=values)
        if flip[:, 0].any():
            raise CheckFailed("Inn element moves the class {1,-1}", values=values)
        if (flip.sum(axis=1) % 2).any():
            raise CheckFailed("Inn element flips an odd number of classes", values=values)
        element_basis = GF2Basis(half, _bits_of_flip_matrix(flip))
        values["element_rank"] = element_basis.rank
        if element_basis.rank != (1 << n) - 2:
            raise CheckFailed("Inn element flip rank off", values=values)
    else:
        values["order"] = rank_basis.order
    return values


def check_not_automorphic(ctx):
    if ctx.n < 3:
        return {"applicable": False, "note": "Q_n is a group for n <= 2"}
    t = ctx.table
    half = ctx.half

    def is_hom(f):
        return np.array_equal(f[t], t[f[:, None], f[None, :]])

    aut_order = 1344 << (ctx.n - 3)
    inn_order = 1 << ((1 << ctx.n) - 2)
    e = ctx.e_idx
    f = compose(ctx.gens.T[1], ctx.gens.T[e]).images.astype(np.int32)
    perturbed = 0
    for cx in range(2, half):
        if is_hom(f):
            # adjust by T_y T_x, which flips two more classes and must break
            # the homomorphism property
            cy = cx + 1 if cx + 1 < half else 2
            tt = compose(ctx.gens.T[cx], ctx.gens.T[cy]).images.astype(np.int32)
            f = tt[f]
            perturbed += 1
        else:
            break
    if is_hom(f):
        raise CheckFailed("could not find a non-automorphism in Inn")
    bad = np.argwhere(f[t] != t[f[:, None], f[None, :]])[0]
    return {
        "inn_order": inn_order,
        "aut_order": aut_order,
        "orders_incompatible": inn_order > aut_order,
        "perturbations": perturbed,
        "witness_pair": [int(bad[0]), int(bad[1])],
    }


def check_involution_product_criterion(ctx):
    K = build_K(ctx.n)
    pairs = 0
    for i, g in enumerate(K.generators):
        for h in K.generators[i + 1 :]:
            gh = compose(g, h)
            order2 = permgroup.perm_order(gh) == 2
            commute = gh == compose(h, g)
            if order2 != commute:
                raise CheckFailed("|gh| = 2 iff commuting fails", witness=(i,))
            if not order2:
                raise CheckFailed("K generators do not pairwise satisfy |gh| = 2", witness=(i,))
            pairs += 1
    return {"pairs": pairs}


def _restricted_translation(ctx, gen_idx, pts):
    """The translation by i_{gen_idx} frozen to identity off the 8 points."""
    imgs = np.arange(ctx.m, dtype=np.uint8)
    row = ctx.left_rows[1 << (gen_idx - 1)]
    for p in pts:
        imgs[p] = row[p]
    return permgroup.Permutation(imgs, validate=False)


def check_small_product_orders(ctx):
    t = ctx.table
    half = ctx.half
    n = ctx.n
    flagged = 0
    instances = 0
    T = ctx.gens.T
    for j in range(1, n + 1):
        ij = 1 << (j - 1)
        for k in range(1, n + 1):
            if k == j:
                continue
            ik = 1 << (k - 1)
            for x in range(ctx.m):
                jx = int(t[ij, x])
                kx = int(t[ik, x])
                jkx = int(t[ij, kx])
                kjx = int(t[ik, jx])
                if (jkx ^ kjx) not in (0, half):
                    raise CheckFailed("i_j(i_k x) not +/- i_k(i_j x)", witness=(j, k, x))
                s = 1 if jkx == kjx else -1
                pts = []
                for base in (x, jx, kx, jkx):
                    pts += [base % ctx.m, (base ^ half) % ctx.m]
                pts = sorted(set(pts))
                p_jk = _restricted_translation(ctx, j, pts)
                p_kj = _restricted_translation(ctx, k, pts)
                q = compose(compose(T[kx], T[x]), p_jk)
                if permgroup.perm_order(q) != 2:
                    raise CheckFailed("|q_{j,k}(x)| != 2", witness=(j, k, x))
                if s == 1:
                    members = (compose(T[jx], T[x]), compose(T[jkx], T[kx]))
                else:
                    members = (compose(T[jkx], T[x]), compose(T[kx], T[jx]))
                outcomes = []
                for tmem in members:
                    tp = compose(tmem, p_kj)
                    outcomes.append(
                        permgroup.perm_order(tp) == 2
                        and permgroup.perm_order(compose(q, tp)) == 2
                    )
                if not any(outcomes):
                    raise CheckFailed("no member of M works", witness=(j, k, x))
                if not all(outcomes):
                    flagged += 1
                instances += 1
    return {"instances": instances, "flagged_member_disagreements": flagged, "range": "full"}


def check_last_generator_anticommutes(ctx):
    t = ctx.table
    half, e = ctx.half, ctx.e_idx
    qprev = np.array(
        [s * half + u for s in (0, 1) for u in range(half >> 1)], dtype=int
    )
    for k in range(1, ctx.n):
        ik = 1 << (k - 1)
        lhs = t[ik, t[e, qprev]]
        rhs = t[e, t[ik, qprev]] ^ half
        if not np.array_equal(lhs, rhs):
            raise CheckFailed("i_k(i_n x) != -i_n(i_k x)", witness=k)
    return {"instances": int((ctx.n - 1) * qprev.size), "range": "full"}


def check_central_swap_lifts(ctx):
    t = ctx.table
    half, e = ctx.half, ctx.e_idx
    qprev = np.array(
        [s * half + u for s in (0, 1) for u in range(half >> 1)], dtype=int
    )
    xe = t[qprev, e]
    count = 0
    for j in range(1, ctx.n):
        ij = 1 << (j - 1)
        for k in range(1, ctx.n):
            if k == j:
                continue
            ik = 1 << (k - 1)
            base_sign = t[ij, t[ik, qprev]] == t[ik, t[ij, qprev]]
            lift_sign = t[ij, t[ik, xe]] == t[ik, t[ij, xe]]
            if not np.array_equal(base_sign, lift_sign):
                bad = int(np.argmax(base_sign != lift_sign))
                raise CheckFailed("swap sign does not lift along e", witness=(j, k, int(qprev[bad])))
            count += qprev.size
    return {"instances": count, "range": "full"}


def check_k_construction(ctx):
    K = build_K(ctx.n)
    if not permgroup.is_elem_abelian_2(K.generators):
        raise CheckFailed("K not elementary abelian")
    distinct = {g.images.tobytes() for g in k_elements(K)}
    if len(distinct) != K.order:
        raise CheckFailed("subset products of K collide")
    return {"order": K.order, "generators": len(K.generators)}


def check_n_construction(ctx):
    N = build_N(ctx.n, ctx.mode, cap=ctx.cap)
    values = {"rank": N.basis.rank, "order": N.order}
    if N.basis.rank != ctx.half - 1:
        raise CheckFailed("N basis rank off", values=values)
    if ctx.exhaustive:
        rows = N.closure.elements
        is_flip, flip = _flip_pattern(rows)
        if not is_flip.all():
            raise CheckFailed("element of N is not a flip", values=values)
        if (flip.sum(axis=1) % 2).any():
            raise CheckFailed("element of N flips oddly many classes", values=values)
        for bits in _bits_of_flip_matrix(flip):
            if not N.basis.contains(bits):
                raise CheckFailed("element of N escapes span(N*)", values=values)
        values["elements_checked"] = len(rows)
    return values


def check_semidirect(ctx):
    cert = verify_semidirect(
        mlt_group(ctx.n, ctx.mode, cap=ctx.cap),
        build_N(ctx.n, ctx.mode, cap=ctx.cap),
        build_K(ctx.n),
    )
    values = {
        "order_g": cert.order_g,
        "order_n": cert.order_n,
        "order_k": cert.order_k,
        "k_in_g": cert.k_in_g,
    }
    if not (cert.valid and cert.k_in_g):
        raise CheckFailed("two-sided semidirect certificate invalid", witness=cert.witness, values=values)
    return values


def check_onesided_semidirect(ctx):
    cert = verify_semidirect_onesided(ctx.n, ctx.mode, cap=ctx.cap)
    values = {
        "order_g": cert.order_g,
        "order_n": cert.order_n,
        "order_k": cert.order_k,
        "k_in_g": cert.k_in_g,
    }
    ok = cert.valid and (cert.k_in_g or ctx.n < 3)
    if ctx.n < 3:
        values["note"] = "K is not inside Mlt_l at n = 2; order bookkeeping still holds"
    if not ok:
        raise CheckFailed("one-sided semidirect certificate invalid", witness=cert.witness, values=values)
    return values


def check_onesided_inner_groups(ctx):
    n = ctx.n
    left = onesided_inn(n, "left", ctx.mode, cap=ctx.cap)
    right = onesided_inn(n, "right", ctx.mode, cap=ctx.cap)
    values = {"order_left": left.order, "order_right": right.order}
    if ctx.exhaustive:
        if not left.closure.same_elements(right.closure):
            raise CheckFailed("Inn_l != Inn_r as sets", values=values)
        ok, dist = _orders_ok(left.closure.elements)
        if not ok.all() or dist["order_4"]:
            raise CheckFailed("Inn_l has an element of order > 2", values=values)
    else:
        lb = mltgroups._onesided_flip_basis(n, "left")
        rb = mltgroups._onesided_flip_basis(n, "right")
        if not lb.spans_same(rb):
            raise CheckFailed("Inn_l and Inn_r span different flips", values=values)
    mlt_l = onesided_mlt(n, "left", ctx.mode, cap=ctx.cap)
    values["order_mlt_left"] = mlt_l.order
    if mlt_l.order != (1 << (n + 1)) * left.order:
        raise CheckFailed("|Mlt_l| != |Q_n| |Inn_l|", values=values)
    if n >= 3:
        expect = 1 << ((1 << (n - 1)) - 1)
        values["expected_order"] = expect
        if left.order != expect:
            raise CheckFailed("|Inn_l| off", values=values)
    else:
        values["note"] = "order formula applies to nonassociative Q_n (n >= 3)"
    return values


def check_mirror_conjugation(ctx):
    n = ctx.n
    J = mirror_conjugator(n)
    if not compose(J, J).is_identity():
        raise CheckFailed("J is not an involution")
    t = ctx.table
    half = ctx.half
    jarr = J.images
    for a in range(ctx.m):
        la = ctx.left_rows[a]
        conj = jarr[la[jarr]]
        a_inv = a ^ (half if a % half else 0)
        r_ainv = np.asarray(t[:, a_inv], dtype=np.uint8)
        if not np.array_equal(conj, r_ainv):
            raise CheckFailed("J L_a J != R_{a^{-1}}", witness=a)
    values = {"generators": ctx.m}
    if ctx.exhaustive:
        mlt_l = onesided_mlt(n, "left", "exhaustive", cap=ctx.cap)
        mlt_r = onesided_mlt(n, "right", "exhaustive", cap=ctx.cap)
        conj = permgroup.conjugate_by(J, mlt_l.closure)
        if not conj.same_elements(mlt_r.closure):
            raise CheckFailed("J Mlt_l J != Mlt_r")
        values["mlt_l"] = len(mlt_l.closure)
    return values


def check_doubled_associators(ctx):
    n = ctx.n
    t = ctx.table
    half, e = ctx.half, ctx.e_idx
    prev_half = half >> 1
    base = np.array(
        [s * half + u for s in (0, 1) for u in range(prev_half)], dtype=int
    )
    lift0 = base
    lift1 = t[base, e]

    X, Y, Z = np.meshgrid(base, base, base, indexing="ij")
    sgn = cdcore.sign_table(n).matrix.astype(np.int32)
    mask = half - 1

    def comm(a, b):
        u, v = a & mask, b & mask
        return sgn[u, v] * sgn[v, u]

    def assoc(a, b, c):
        u, v, w = a & mask, b & mask, c & mask
        return sgn[u, v] * sgn[u ^ v, w] * sgn[v, w] * sgn[u, v ^ w]

    def lifted(arr, bit):
        return t[arr, e] if bit else arr

    checked = 0
    identities = [
        ((0, 0, 1), lambda x, y, z: comm(x, y) * assoc(z, y, x)),
        ((0, 1, 0), lambda x, y, z: comm(x, z) * assoc(y, x, z) * assoc(y, z, x)),
        ((0, 1, 1), lambda x, y, z: comm(x, y) * comm(x, z) * assoc(z, x, y) * assoc(x, z, y)),
        ((1, 0, 0), lambda x, y, z: comm(y, z) * assoc(x, y, z)),
        ((1, 0, 1), lambda x, y, z: comm(y, x) * comm(y, z) * assoc(z, y, x)),
        ((1, 1, 0), lambda x, y, z: comm(z, x) * comm(z, y) * assoc(y, x, z) * assoc(y, z, x)),
        ((1, 1, 1), lambda x, y, z: comm(x, y) * comm(x, z) * comm(y, z) * assoc(z, x, y) * assoc(x, z, y)),
    ]
    for (bx, by, bz), rhs_fn in identities:
        lhs = ctx.assoc_idx(lifted(X, bx), lifted(Y, by), lifted(Z, bz))
        rhs = rhs_fn(X, Y, Z)
        if not np.array_equal(lhs, rhs):
            bad = np.argwhere(lhs != rhs)[0]
            raise CheckFailed(
                "doubled associator identity fails",
                witness={"pattern": [bx, by, bz], "triple": [int(v) for v in bad]},
            )
        checked += lhs.size
    return {"instances": checked, "range": "full"}


def check_inner_e_shift(ctx):
    t = ctx.table
    half, e = ctx.half, ctx.e_idx
    for x in range(ctx.m):
        xe = int(t[x, e])
        if ctx.gens.Lxy[x, e] != ctx.gens.Lxy[xe, e]:
            raise CheckFailed("L_{x,e} != L_{xe,e}", witness=x)
    prev_mask = (half >> 1) - 1
    low = half >> 1
    checked = 0
    for x in range(ctx.m):
        for y in range(ctx.m):
            v = flip_decompose(ctx.gens.Lxy[x, y]).bits
            lower = v & ((1 << low) - 1)
            upper = v >> low
            c = cdcore.comm_sign(ctx.n, x & prev_mask, y & prev_mask)
            expect = lower if c == 1 else lower ^ ((1 << low) - 1)
            if upper != expect:
                raise CheckFailed("sign of L_{x,y} at ze does not track [xbar,ybar]", witness=(x, y))
            checked += 1
    return {"pairs": checked, "range": "full"}


def check_generator_assoc_classification(ctx):
    if ctx.n < 4:
        return {"applicable": False, "instances": 0}
    n = ctx.n
    t = looptable.cd_table(n)
    table = ctx.table
    half, e = ctx.half, ctx.e_idx
    rng = ctx.rng("ik-classify")
    classify_cache = {}
    quasi = 0
    oct_ = 0
    instances = 0
    max_classify = None if ctx.exhaustive else 40

    def classify(members):
        key = tuple(members)
        if key not in classify_cache:
            classify_cache[key] = looptable.classify_subloop16(
                t, looptable.Subloop(key)
            )
        return classify_cache[key]

    for k in range(1, n):
        ik = 1 << (k - 1)
        qk = [s * half + u for s in (0, 1) for u in range(1 << k)]
        ys = [s * half + u | e for s in (0, 1) for u in range(1 << k)]
        classify_budget = list(range(len(qk) * len(ys)))
        if max_classify is not None:
            classify_budget = set(rng.choice(len(classify_budget), size=min(max_classify, len(classify_budget)), replace=False).tolist())
        slot = 0
        for x in qk:
            cx = x % half
            degenerate = cx in (0, ik)
            for y in ys:
                cy = y % half
                special = cy in (e, e ^ ik, e ^ cx, e ^ ik ^ cx)
                expect = 1 if degenerate else (-1 if special else 1)
                s1 = int(ctx.assoc_idx(np.array(ik), np.array(x), np.array(y)))
                s2 = int(ctx.assoc_idx(np.array(x), np.array(ik), np.array(y)))
                if s1 != expect or s2 != expect:
                    raise CheckFailed(
                        "[i_k,x,y] classification fails", witness=(k, x, y)
                    )
                instances += 1
                if not degenerate and (max_classify is None or slot in classify_budget):
                    sub = looptable.generate_subloop(t, (ik, x, y))
                    if len(sub) != 16:
                        raise CheckFailed("<i_k,x,y> is not of size 16", witness=(k, x, y))
                    kind = classify(sub.elements)
                    want = "O16" if special else "QuasiO16"
                    if kind != want:
                        raise CheckFailed(
                            "subloop class does not match associator split",
                            witness=(k, x, y),
                        )
                    if kind == "QuasiO16":
                        quasi += 1
                    else:
                        oct_ += 1
                slot += 1
    return {
        "instances": instances,
        "classified_o16": oct_,
        "classified_quasi": quasi,
        "range": "full" if ctx.exhaustive else "signs full, classification sampled",
    }


def check_upper_half_flip(ctx):
    if ctx.n < 4:
        return {"applicable": False}
    h = mltgroups.h_mapping(ctx.n)
    v = flip_decompose(h)
    if not compose(h, h).is_identity():
        raise CheckFailed("h is not an involution")
    return {"flipped_classes": v.weight, "expected": ctx.half // 2}


def check_translation_factorization(ctx):
    half = ctx.half
    linv_rows = np.stack(
        [invert(permgroup.Permutation(r, validate=False)).images for r in ctx.left_rows]
    ).astype(np.uint8)
    if ctx.exhaustive:
        rows = ctx.mlt.closure.elements
        label = "full"
    else:
        rows = ctx.sampled_mlt_rows()
        label = "sampled"
    sel = linv_rows[rows[:, 0]]
    residue = np.take_along_axis(sel, rows, axis=1)
    is_flip, _ = _flip_pattern(residue)
    if not is_flip.all():
        raise CheckFailed(
            "element does not factor as L_x (flip)",
            witness=int(np.argmin(is_flip)),
        )
    return {"elements": rows.shape[0], "range": label}


def check_mlt_center(ctx):
    half = ctx.half
    m = ctx.m
    ident = np.arange(m, dtype=np.uint8)
    lminus = ident ^ half
    gen_rows = ctx.translation_rows
    if ctx.exhaustive:
        cand = ctx.mlt.closure.elements
        for g in gen_rows:
            left = cand[:, g]
            right = g[cand]
            cand = cand[np.all(left == right, axis=1)]
        got = {row.tobytes() for row in cand}
        want = {ident.tobytes(), lminus.tobytes()}
        if got != want:
            raise CheckFailed("Z(Mlt) != {id, L_{-1}}", values={"size": len(got)})
        return {"center_size": len(got), "range": "full"}
    for z in (ident, lminus):
        for g in gen_rows:
            if not np.array_equal(z[g], g[z]):
                raise CheckFailed("central candidate fails to commute")
    return {"containment_only": True, "note": "full equality enumerated for n <= 4"}


CHECKS = [
    ("even_permutations", "every element of Mlt(Q_n) is an even permutation", check_even_permutations),
    ("element_orders", "every element of Mlt(Q_n) has order 1, 2 or 4", check_element_orders),
    ("associator_symmetry", "[x,y,z] = [z,y,x]", check_associator_symmetry),
    ("conjugation_flip_form", "T_x flips every class except {1} and {x}", check_conjugation_flip_form),
    ("conjugation_pair_flips", "T_y T_x = (x,-x)(y,-y)", check_conjugation_pair_flips),
    ("left_inner_e_form", "L_{x,e} flips every class except {1},{x},{e},{xe}", check_left_inner_e_form),
    ("left_inner_pair_e", "L_{y,e} L_{x,e} = (x,-x)(y,-y)(xe,-xe)(ye,-ye)", check_left_inner_pair_e),
    ("left_right_inner_agree", "L_{x,y} = R_{x,y} for all x, y", check_left_right_inner_agree),
    ("inner_group_structure", "Inn(Q_n) is elementary abelian of order 2^(2^n - 2), sign flips fixing {1,-1}", check_inner_group_structure),
    ("not_automorphic", "some inner mapping is not an automorphism (n >= 3)", check_not_automorphic),
    ("involution_product_criterion", "|g_j g_k| = 2 iff the K generators commute", check_involution_product_criterion),
    ("small_product_orders", "adjusted translation fragments and their products are involutions", check_small_product_orders),
    ("last_generator_anticommutes", "i_k(i_n x) = -i_n(i_k x) for x in Q_{n-1}", check_last_generator_anticommutes),
    ("central_swap_lifts", "the swap sign of i_j, i_k on x persists on x i_n", check_central_swap_lifts),
    ("k_construction", "K is elementary abelian of order 2^n with a class transversal", check_k_construction),
    ("n_construction", "N = Inn x Z has basis rank 2^n - 1 and equals Inn u (-Inn)", check_n_construction),
    ("semidirect_decomposition", "Mlt(Q_n) = (Inn(Q_n) x Z(Q_n)) x| K", check_semidirect),
    ("onesided_semidirect", "Mlt_l(Q_n) = (Inn_l(Q_n) x Z(Q_n)) x| K", check_onesided_semidirect),
    ("onesided_inner_groups", "Inn_l = Inn_r, elementary abelian of order 2^(2^(n-1) - 1) for n >= 3", check_onesided_inner_groups),
    ("mirror_conjugation", "conjugation by inversion carries Mlt_l onto Mlt_r", check_mirror_conjugation),
    ("doubled_associators", "the seven doubled associator identities on Q_{n-1}", check_doubled_associators),
    ("inner_e_shift", "L_{x,e} = L_{xe,e}; sign of L_{x,y} at ze tracks [xbar,ybar]", check_inner_e_shift),
    ("generator_assoc_classification", "[i_k,x,y] sign split matches the O16/QuasiO16 classification (n >= 4)", check_generator_assoc_classification),
    ("upper_half_flip", "prod L_{x,i_{n-1}} over Q_{n-2} flips exactly the classes outside Q_{n-1} (n >= 4)", check_upper_half_flip),
    ("translation_factorization", "every element of Mlt(Q_n) is L_x composed with a sign flip", check_translation_factorization),
    ("mlt_center", "Z(Mlt(Q_n)) = {L_x : x in Z(Q_n)}", check_mlt_center),
]


def theorem_suite(n, mode="auto", cap=mltgroups.DEFAULT_CAP, seed=0):
    """Run every check against Q_n and collect a VerificationReport."""
    if n < 2:
        raise ValueError("theorem_suite needs n >= 2")
    mode = resolve_mode(n, mode)
    ctx = SuiteContext(n, mode, cap, seed)
    report = VerificationReport(n=n, mode=mode, seed=seed)
    for name, anchor, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            values = fn(ctx)
            status, witness = "pass", None
        except CheckFailed as exc:
            status, witness, values = "fail", exc.witness, dict(exc.values)
            values["error"] = str(exc)
        except CapExceeded as exc:
            status, witness, values = "skipped", None, {"reason": str(exc)}
        ms = (time.perf_counter() - t0) * 1000
        report.checks.append(CheckResult(name, anchor, status, values, witness, ms))
    return report
