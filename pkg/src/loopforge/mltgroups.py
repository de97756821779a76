"""Translations, inner mappings, and the group structure of Q_n.

Builds L_x, R_x, T_x = L_x^{-1}R_x, L_{x,y} = L_{yx}^{-1}L_yL_x and
R_{x,y} = R_{xy}^{-1}R_yR_x as explicit permutations of the 2^{n+1} element
indices, then assembles:

  Mlt(Q_n)   closure of all translations          (exhaustive mode, n <= 4)
             or |Q_n| * |Inn(Q_n)| by the transversal argument (rank mode)
  Inn(Q_n)   stabilizer of 1 in Mlt, or the GF(2) span of the generator
             flip vectors (every inner mapping only flips sign classes)
  K          the elementary abelian complement generated by adjusted left
             translations g_{k,n} = (prod_{x in s_{k,n}} T_x) L_{i_k}
  N          Inn(Q_n) x Z(Q_n), spanned by L_{-1}T_e and the T_xT_e

and the certificates that Mlt = N x| K (and the one-sided analogue).
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import cdcore, looptable, permgroup
from .permgroup import (
    GF2Basis,
    GroupClosure,
    Permutation,
    closure,
    compose,
    flip_decompose,
    invert,
    perm_order,
    stabilizer_of_identity,
)

DEFAULT_CAP = permgroup.DEFAULT_CAP


class ConstructionError(RuntimeError):
    """A verified construction failed its own checks; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def resolve_mode(n, mode):
    if mode == "auto":
        return "exhaustive" if n <= 4 else "rank"
    if mode not in ("exhaustive", "rank"):
        raise ValueError(f"mode must be auto/exhaustive/rank, got {mode!r}")
    return mode


def _as_index(n, x):
    if isinstance(x, cdcore.LoopElement):
        if x.n != n:
            raise cdcore.DimensionMismatch(f"element of Q_{x.n} used in Q_{n}")
        return x.index()
    return int(x)


def _perm(images):
    return Permutation(np.asarray(images, dtype=np.uint8), validate=False)


@lru_cache(maxsize=None)
def _translation_rows(n):
    t = looptable.cd_table(n).table
    left = np.ascontiguousarray(t, dtype=np.uint8)
    right = np.ascontiguousarray(t.T, dtype=np.uint8)
    left.setflags(write=False)
    right.setflags(write=False)
    return left, right


def left_translation(n, x):
    return _perm(_translation_rows(n)[0][_as_index(n, x)])


def right_translation(n, x):
    return _perm(_translation_rows(n)[1][_as_index(n, x)])


@lru_cache(maxsize=None)
def translation_generators(n):
    """All L_x then all R_x, in element-index order."""
    left, right = _translation_rows(n)
    return [_perm(row) for row in left] + [_perm(row) for row in right]


def left_translation_generators(n):
    left, _ = _translation_rows(n)
    return [_perm(row) for row in left]


def right_translation_generators(n):
    _, right = _translation_rows(n)
    return [_perm(row) for row in right]


def inner_T(n, x):
    """T_x = L_x^{-1} R_x; fixes 1 and acts as z -> [x,z] z."""
    return compose(invert(left_translation(n, x)), right_translation(n, x))


def inner_L(n, x, y):
    lx = left_translation(n, x)
    ly = left_translation(n, y)
    yx = looptable.cd_table(n).mul(_as_index(n, y), _as_index(n, x))
    return compose(invert(left_translation(n, yx)), compose(ly, lx))


def inner_R(n, x, y):
    rx = right_translation(n, x)
    ry = right_translation(n, y)
    xy = looptable.cd_table(n).mul(_as_index(n, x), _as_index(n, y))
    return compose(invert(right_translation(n, xy)), compose(ry, rx))


@dataclass
class InnerGenerators:
    n: int
    T: dict
    Lxy: dict
    Rxy: dict


@lru_cache(maxsize=None)
def inner_generators(n):
    """Every T_x, L_{x,y}, R_{x,y}, keyed by element indices."""
    m = 1 << (n + 1)
    T = {x: inner_T(n, x) for x in range(m)}
    Lxy = {}
    Rxy = {}
    left, right = _translation_rows(n)
    table = looptable.cd_table(n).table
    linv = {x: invert(_perm(left[x])) for x in range(m)}
    rinv = {x: invert(_perm(right[x])) for x in range(m)}
    for x in range(m):
        lx, rx = left[x], right[x]
        for y in range(m):
            Lxy[x, y] = _perm(linv[table[y, x]].images[left[y][lx]])
            Rxy[x, y] = _perm(rinv[table[x, y]].images[right[y][rx]])
    return InnerGenerators(n, T, Lxy, Rxy)


def mirror_conjugator(n):
    """The inversion map J: x -> x^{-1}; J L_a J = R_{a^{-1}}."""
    half = 1 << n
    idx = np.arange(2 * half)
    exps = idx & (half - 1)
    return _perm(idx ^ np.where(exps != 0, half, 0))


# ---------------------------------------------------------------------------
# Group handles.

@dataclass
class GroupHandle:
    """A group given either by an enumerated closure or by a GF(2) basis of
    flip vectors (rank mode); order is exact either way."""

    name: str
    n: int
    mode: str
    order: int
    closure: Optional[GroupClosure] = None
    basis: Optional[GF2Basis] = None

    @property
    def log2_order(self):
        o = self.order
        return o.bit_length() - 1 if o & (o - 1) == 0 else None


@lru_cache(maxsize=8)
def _mlt_closure(n, cap):
    return closure(translation_generators(n), cap=cap)


@lru_cache(maxsize=8)
def _mlt_onesided_closure(n, side, cap):
    gens = (
        left_translation_generators(n)
        if side == "left"
        else right_translation_generators(n)
    )
    return closure(gens, cap=cap)


class CapExceeded(RuntimeError):
    pass


def _complete(cl):
    if cl.truncated:
        raise CapExceeded(
            f"closure truncated at {len(cl)} elements; raise the cap"
        )
    return cl


def _inn_flip_basis(n):
    gens = inner_generators(n)
    basis = GF2Basis(1 << n)
    for x in sorted(gens.T):
        basis.insert(flip_decompose(gens.T[x]))
    for key in sorted(gens.Lxy):
        basis.insert(flip_decompose(gens.Lxy[key]))
    for key in sorted(gens.Rxy):
        basis.insert(flip_decompose(gens.Rxy[key]))
    return basis


def _onesided_flip_basis(n, side):
    gens = inner_generators(n)
    source = gens.Lxy if side == "left" else gens.Rxy
    basis = GF2Basis(1 << n)
    for key in sorted(source):
        basis.insert(flip_decompose(source[key]))
    return basis


def inn_group(n, mode="auto", cap=DEFAULT_CAP):
    if n < 1:
        raise ValueError("inn_group needs n >= 1")
    mode = resolve_mode(n, mode)
    if mode == "exhaustive":
        stab = stabilizer_of_identity(_complete(_mlt_closure(n, cap)))
        return GroupHandle("Inn", n, mode, len(stab), closure=stab)
    basis = _inn_flip_basis(n)
    return GroupHandle("Inn", n, mode, basis.order, basis=basis)


def mlt_group(n, mode="auto", cap=DEFAULT_CAP):
    mode = resolve_mode(n, mode)
    if mode == "exhaustive":
        cl = _complete(_mlt_closure(n, cap))
        return GroupHandle("Mlt", n, mode, len(cl), closure=cl)
    # transversal argument: the translations map 1 onto all of Q_n, and the
    # stabilizer of 1 is Inn, so |Mlt| = |Q_n| * |Inn|
    inn = inn_group(n, "rank")
    return GroupHandle("Mlt", n, mode, (1 << (n + 1)) * inn.order, basis=inn.basis)


def onesided_inn(n, side, mode="auto", cap=DEFAULT_CAP):
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    mode = resolve_mode(n, mode)
    if mode == "exhaustive":
        gens = inner_generators(n)
        source = gens.Lxy if side == "left" else gens.Rxy
        cl = _complete(closure([source[k] for k in sorted(source)], cap=cap))
        return GroupHandle(f"Inn_{side[0]}", n, mode, len(cl), closure=cl)
    basis = _onesided_flip_basis(n, side)
    return GroupHandle(f"Inn_{side[0]}", n, mode, basis.order, basis=basis)


def onesided_mlt(n, side, mode="auto", cap=DEFAULT_CAP):
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    mode = resolve_mode(n, mode)
    if mode == "exhaustive":
        cl = _complete(_mlt_onesided_closure(n, side, cap))
        return GroupHandle(f"Mlt_{side[0]}", n, mode, len(cl), closure=cl)
    inn = onesided_inn(n, side, "rank")
    return GroupHandle(
        f"Mlt_{side[0]}", n, mode, (1 << (n + 1)) * inn.order, basis=inn.basis
    )


# ---------------------------------------------------------------------------
# The complement K.

@dataclass
class KConstruction:
    n: int
    sets: dict        # k -> frozenset of exponent masks s_{k,n}
    generators: list  # g_{1,n} ... g_{n,n}

    @property
    def order(self):
        return 1 << self.n


def k_sets(n):
    """The inductive index sets: s_{k,n} doubles along i_n, s_{n,n} is the
    even-weight words."""
    if n < 2:
        raise ValueError("K is defined for n >= 2")
    sets = {1: {0b00, 0b10}, 2: {0b00, 0b11}}
    for m in range(3, n + 1):
        top = 1 << (m - 1)
        sets = {k: {u for x in sets[k] for u in (x, x | top)} for k in range(1, m)}
        sets[m] = {u for u in range(1 << m) if bin(u).count("1") % 2 == 0}
    return {k: frozenset(v) for k, v in sets.items()}


def _flip_product_of_T(n, masks):
    gens = inner_generators(n)
    prod = Permutation.identity(1 << (n + 1))
    for u in sorted(masks):
        prod = compose(prod, gens.T[u])  # T_x for the positive representative
    return prod


def build_K(n):
    """Construct K = <g_{1,n}, ..., g_{n,n}> and verify it is elementary
    abelian of order 2^n with a class transversal."""
    sets = k_sets(n)
    half = 1 << n
    gens = []
    for k in range(1, n + 1):
        g = compose(_flip_product_of_T(n, sets[k]), left_translation(n, cdcore.generator(n, k)))
        gens.append(g)
    K = KConstruction(n, sets, gens)

    for k, g in enumerate(gens, start=1):
        if perm_order(g) != 2:
            raise ConstructionError(f"g_{k},{n} does not have order 2", witness=k)
        if g(0) % half != (1 << (k - 1)):
            raise ConstructionError(
                f"g_{k},{n} does not send 1 into the class of i_{k}", witness=k
            )
    for i in range(n):
        for j in range(i + 1, n):
            if compose(gens[i], gens[j]) != compose(gens[j], gens[i]):
                raise ConstructionError(
                    "K generators do not commute", witness=(i + 1, j + 1)
                )
    reached = {}
    for subset, g in zip(range(1 << n), k_elements(K)):
        cls = g(0) % half
        if cls in reached:
            raise ConstructionError(
                "class transversal is not a bijection", witness=(reached[cls], subset)
            )
        reached[cls] = subset
    return K


def k_elements(K):
    """All 2^n subset products of the generators, in subset-mask order."""
    out = []
    for subset in range(1 << K.n):
        g = Permutation.identity(1 << (K.n + 1))
        for k in range(K.n):
            if subset >> k & 1:
                g = compose(g, K.generators[k])
        out.append(g)
    return out


# ---------------------------------------------------------------------------
# N = Inn x Z.

@dataclass
class NConstruction:
    n: int
    mode: str
    basis: GF2Basis     # spanned by N* = {L_{-1}T_e} u {T_xT_e}
    order: int
    closure: Optional[GroupClosure] = None

    def contains_flip(self, v):
        return self.basis.contains(v)


def build_N(n, mode="auto", cap=DEFAULT_CAP):
    if n < 2:
        raise ValueError("build_N needs n >= 2")
    mode = resolve_mode(n, mode)
    half = 1 << n
    e = cdcore.generator(n, n).index()
    gens = inner_generators(n)
    te = gens.T[e]
    lminus1 = left_translation(n, cdcore.minus_one(n))
    basis = GF2Basis(half)
    basis.insert(flip_decompose(compose(lminus1, te)))
    for cls in range(1, half):
        if cls == e:
            continue
        basis.insert(flip_decompose(compose(gens.T[cls], te)))
    if basis.rank != half - 1:
        raise ConstructionError(
            f"N basis rank {basis.rank}, expected {half - 1}"
        )
    order = 1 << (half - 1)
    cl = None
    if mode == "exhaustive":
        inn = inn_group(n, "exhaustive", cap=cap)
        rows = inn.closure.elements
        neg_rows = lminus1.images.astype(np.uint8)[rows]
        cl = GroupClosure(
            permgroup._canonical_rows(np.vstack([rows, neg_rows])), [], False
        )
        if len(cl) != order:
            raise ConstructionError(
                f"|Inn u -Inn| = {len(cl)}, expected {order}"
            )
    return NConstruction(n, mode, basis, order, closure=cl)


# ---------------------------------------------------------------------------
# Semidirect certificates.

@dataclass
class DecompositionCertificate:
    n: int
    mode: str
    order_g: int
    order_n: int
    order_k: int
    normal_ok: bool
    intersection_trivial: bool
    product_order_ok: bool
    index_ok: bool
    k_in_g: Optional[bool] = None  # informational; see verify functions
    witness: Optional[object] = None

    @property
    def valid(self):
        return (
            self.normal_ok
            and self.intersection_trivial
            and self.product_order_ok
            and self.index_ok
        )


def _conjugation_stays_in_span(n, conjugators, N):
    """g b g^{-1} stays a flip inside span(N*) for every generator g and
    basis vector b; complete normality proof since conjugation by each
    generator then fixes N setwise."""
    half = 1 << n
    basis_perms = [permgroup.flip_permutation(permgroup.FlipVector(half, bits))
                   for bits in N.basis.canonical_rows()]
    for g in conjugators:
        ginv = invert(g)
        for b in basis_perms:
            c = compose(g, compose(b, ginv))
            try:
                v = flip_decompose(c)
            except permgroup.NotFlipMapError:
                return False, (g, b)
            if not N.basis.contains(v):
                return False, (g, b)
    return True, None


def _k_misses_n(K, half):
    """Non-identity elements of K move 1 out of the class {1,-1}, while all
    of N fixes that class; so N n K = {id}."""
    for subset, g in enumerate(k_elements(K)):
        if subset == 0:
            continue
        if g(0) % half == 0:
            return False, subset
    return True, None


def verify_semidirect(G, N, K):
    """Certificate for Mlt = (Inn x Z) x| K; G from mlt_group, N from
    build_N, K from build_K."""
    n = G.n
    half = 1 << n
    conjugators = translation_generators(n)
    normal_ok, witness = _conjugation_stays_in_span(n, conjugators, N)
    if normal_ok and G.closure is not None and len(G.closure) <= 4096:
        # small enough: literal conjugation by every group element
        normal_ok = _literal_normality(G.closure, N)
    inter_ok, inter_witness = _k_misses_n(K, half)
    if G.closure is not None:
        k_in_g = all(g in G.closure for g in k_elements(K))
        nset = N.closure
        if nset is not None:
            inter_ok = inter_ok and all(
                not (g in nset) for i, g in enumerate(k_elements(K)) if i
            )
    else:
        k_in_g = True  # each g_{k,n} is a composite of T's and L's by construction
    product_ok = N.order * K.order == G.order
    index_ok = G.order % N.order == 0 and G.order // N.order == K.order
    return DecompositionCertificate(
        n=n,
        mode=G.mode,
        order_g=G.order,
        order_n=N.order,
        order_k=K.order,
        normal_ok=normal_ok,
        intersection_trivial=inter_ok,
        product_order_ok=product_ok,
        index_ok=index_ok,
        k_in_g=k_in_g,
        witness=witness or inter_witness,
    )


def _literal_normality(cl, N):
    rows = cl.elements
    inv_rows = np.argsort(rows, axis=1).astype(np.uint8)
    ok = True
    for bits in N.basis.canonical_rows():
        b = permgroup.flip_permutation(
            permgroup.FlipVector(rows.shape[1] // 2, bits)
        ).images.astype(np.uint8)
        conj = np.take_along_axis(rows, b[inv_rows], axis=1)
        for i in range(conj.shape[0]):
            try:
                v = flip_decompose(_perm(conj[i]))
            except permgroup.NotFlipMapError:
                return False
            if not N.basis.contains(v):
                return False
    return ok


def _h_product(n):
    """prod of L_{x, i_{n-1}} over the classes of Q_{n-2} (left-only word)."""
    if n < 3:
        raise ValueError("needs n >= 3")
    gens = inner_generators(n)
    i_nm1 = 1 << (n - 2)  # index of i_{n-1}
    prod = Permutation.identity(1 << (n + 1))
    for u in range(1 << (n - 2)):
        prod = compose(prod, gens.Lxy[u, i_nm1])
    return prod


def h_mapping(n):
    """The product of L_{x, i_{n-1}} over Q_{n-2} classes; verified to flip
    exactly the classes outside Q_{n-1}."""
    if n < 4:
        raise ValueError("h_mapping needs n >= 4")
    h = _h_product(n)
    half = 1 << n
    v = flip_decompose(h)
    expect = 0
    for cls in range(half):
        if cls >> (n - 1) & 1:
            expect |= 1 << cls
    if v.bits != expect:
        raise ConstructionError("h does not flip exactly the upper classes", witness=v)
    return h


def _k_rewrite_leftonly(n, K):
    """The g_{k,n} rewritten through L_{x,e} products (and the h product for
    k = n); equality with the T-form certifies K <= Mlt_l."""
    if n < 3:
        raise ValueError("rewriting needs n >= 3")
    gens = inner_generators(n)
    e = 1 << (n - 1)
    prev = k_sets(n - 1) if n > 2 else None
    out = []
    for k in range(1, n):
        prod = Permutation.identity(1 << (n + 1))
        for u in sorted(prev[k]):
            prod = compose(prod, gens.Lxy[u, e])
        out.append(compose(prod, left_translation(n, cdcore.generator(n, k))))
    prod = Permutation.identity(1 << (n + 1))
    for u in sorted(prev[n - 1]):
        prod = compose(prod, gens.Lxy[u, e])
    prod = compose(prod, _h_product(n))
    out.append(compose(prod, left_translation(n, cdcore.generator(n, n))))
    return out


def verify_semidirect_onesided(n, mode="auto", cap=DEFAULT_CAP):
    """Certificate for Mlt_l = (Inn_l x Z) x| K.

    K <= Mlt_l is checked through the left-only rewriting of the g_{k,n}
    (possible for n >= 3); at n = 2 the membership genuinely fails and is
    reported through k_in_g without invalidating the order bookkeeping.
    """
    if n < 2:
        raise ValueError("needs n >= 2")
    mode = resolve_mode(n, mode)
    half = 1 << n
    K = build_K(n)
    G = onesided_mlt(n, "left", mode, cap=cap)
    inn_l = onesided_inn(n, "left", mode, cap=cap)

    basis = GF2Basis(half)
    if mode == "exhaustive":
        for i in range(len(inn_l.closure)):
            basis.insert(flip_decompose(inn_l.closure.perm_at(i)))
    else:
        for row in inn_l.basis.canonical_rows():
            basis.insert(row)
    lminus1 = left_translation(n, cdcore.minus_one(n))
    basis.insert(flip_decompose(lminus1))
    order_n = 2 * inn_l.order
    if basis.order != order_n:
        raise ConstructionError(
            f"N_l span has order {basis.order}, expected {order_n}"
        )
    N = NConstruction(n, mode, basis, order_n, closure=None)

    conjugators = left_translation_generators(n)
    normal_ok, witness = _conjugation_stays_in_span(n, conjugators, N)
    inter_ok, inter_witness = _k_misses_n(K, half)

    if n >= 3:
        k_in_g = all(
            a == b for a, b in zip(K.generators, _k_rewrite_leftonly(n, K))
        )
        if G.closure is not None:
            k_in_g = k_in_g and all(g in G.closure for g in k_elements(K))
    else:
        k_in_g = (
            all(g in G.closure for g in k_elements(K))
            if G.closure is not None
            else False
        )

    product_ok = N.order * K.order == G.order
    index_ok = G.order % N.order == 0 and G.order // N.order == K.order
    return DecompositionCertificate(
        n=n,
        mode=mode,
        order_g=G.order,
        order_n=N.order,
        order_k=K.order,
        normal_ok=normal_ok,
        intersection_trivial=inter_ok,
        product_order_ok=product_ok,
        index_ok=index_ok,
        k_in_g=k_in_g,
        witness=witness or inter_witness,
    )
