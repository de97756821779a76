"""Translations, inner mappings, K/N constructions, certificates."""

import numpy as np
import pytest

from loopforge import cdcore, permgroup
from loopforge.cdcore import generator, minus_one, mul, one, parse_element
from loopforge.mltgroups import (
    CapExceeded,
    build_K,
    build_N,
    h_mapping,
    inn_group,
    inner_generators,
    inner_L,
    inner_R,
    inner_T,
    k_elements,
    k_sets,
    left_translation,
    mirror_conjugator,
    mlt_group,
    onesided_inn,
    onesided_mlt,
    right_translation,
    translation_generators,
    verify_semidirect,
    verify_semidirect_onesided,
)
from loopforge.permgroup import (
    NotFlipMapError,
    closure,
    compose,
    flip_decompose,
    intersection,
    is_normal_in,
    perm_order,
    stabilizer_of_identity,
)


def el(n, text):
    return parse_element(text, n)


def idx(n, text):
    return el(n, text).index()


# ---------------------------------------------------------------------------
# Translations.

def test_left_translation_identity_and_minus_one():
    for n in (2, 3):
        assert left_translation(n, one(n)).is_identity()
        lm = left_translation(n, minus_one(n))
        v = flip_decompose(lm)
        assert v.bits == (1 << (1 << n)) - 1  # flips every class
        assert permgroup.parity(lm) == "even"


def test_left_translation_q2_cycles():
    # L_{i1} = (1, i1, -1, -i1)(i2, i1i2, -i2, -i1i2)
    p = left_translation(2, el(2, "i1"))
    walk = [0]
    for _ in range(3):
        walk.append(p(walk[-1]))
    assert walk == [idx(2, "1"), idx(2, "i1"), idx(2, "-1"), idx(2, "-i1")]
    walk = [idx(2, "i2")]
    for _ in range(3):
        walk.append(p(walk[-1]))
    assert walk == [idx(2, "i2"), idx(2, "i1i2"), idx(2, "-i2"), idx(2, "-i1i2")]


def test_translations_match_element_arithmetic():
    n = 3
    for x in cdcore.elements(n):
        lp = left_translation(n, x)
        rp = right_translation(n, x)
        for y in cdcore.elements(n):
            assert lp(y.index()) == mul(x, y).index()
            assert rp(y.index()) == mul(y, x).index()


def test_left_translation_order_four():
    p = left_translation(3, el(3, "i1"))
    assert perm_order(p) == 4
    assert permgroup.parity(p) == "even"


# ---------------------------------------------------------------------------
# Inner mappings.

def test_inner_t_identity_and_flip_form():
    assert inner_T(2, one(2)).is_identity()
    t = inner_T(2, el(2, "i1"))
    v = flip_decompose(t)
    # fixes classes {1}, {i1}; negates {i2}, {i1i2}
    assert v.bits == (1 << idx(2, "i2")) | (1 << idx(2, "i1i2"))


def test_inner_t_matches_commutator_formula():
    n = 3
    for x in cdcore.elements(n):
        t = inner_T(n, x)
        assert t(0) == 0
        for z in cdcore.elements(n):
            s = cdcore.commutator(x, z)
            expect = z if s == 1 else -z
            assert t(z.index()) == expect.index()


def test_inner_l_e_fixed_points():
    # L_{i1, i3} in Q_3 fixes +/-{1, i1, i3, i1i3} and negates the rest
    p = inner_L(3, el(3, "i1"), el(3, "i3"))
    v = flip_decompose(p)
    fixed = {idx(3, "1"), idx(3, "i1"), idx(3, "i3"), idx(3, "i1i3")}
    for cls in range(8):
        assert bool(v.bits >> cls & 1) == (cls not in fixed)


def test_inner_maps_match_generator_dicts():
    n = 3
    gens = inner_generators(n)
    for x in cdcore.elements(n):
        assert gens.T[x.index()] == inner_T(n, x)
    for xt, yt in (("i1", "i2"), ("i2i3", "-i1"), ("i1i2i3", "i3")):
        x, y = el(n, xt), el(n, yt)
        assert gens.Lxy[x.index(), y.index()] == inner_L(n, x, y)
        assert gens.Rxy[x.index(), y.index()] == inner_R(n, x, y)


def test_inner_l_equals_inner_r():
    for n in (2, 3):
        gens = inner_generators(n)
        for key in gens.Lxy:
            assert gens.Lxy[key] == gens.Rxy[key]


def test_flip_decompose_examples():
    # T_{i3} T_{i1} flips exactly the classes {i1}, {i3}
    p = compose(inner_T(3, el(3, "i1")), inner_T(3, el(3, "i3")))
    v = flip_decompose(p)
    assert v.bits == (1 << idx(3, "i1")) | (1 << idx(3, "i3"))
    with pytest.raises(NotFlipMapError):
        flip_decompose(left_translation(3, el(3, "i1")))


# ---------------------------------------------------------------------------
# Group orders (exhaustive closures).

def test_mlt_inn_orders_small():
    assert mlt_group(2).order == 32
    assert inn_group(2).order == 4
    assert mlt_group(3).order == 1024
    assert inn_group(3).order == 64


def test_closure_of_h8_translations():
    gens = translation_generators(2)
    cl = closure(gens)
    assert len(cl) == 32  # (G x G) / diagonal center for G = H_8
    stab = stabilizer_of_identity(cl)
    assert len(stab) == 4  # H_8 / Z


def test_mlt_closure_is_closed_exhaustive():
    cl = mlt_group(3).closure
    rows = cl.elements
    keys = cl._byteset
    for i in range(len(cl)):
        prods = np.take_along_axis(
            np.broadcast_to(rows[i], rows.shape), rows, axis=1
        )
        for j in range(prods.shape[0]):
            assert prods[j].tobytes() in keys


def test_rank_matches_enumeration_n3():
    assert inn_group(3, "rank").order == inn_group(3, "exhaustive").order
    assert mlt_group(3, "rank").order == mlt_group(3, "exhaustive").order


def test_onesided_orders_n3():
    assert onesided_inn(3, "left").order == 8
    assert onesided_inn(3, "right").order == 8
    assert onesided_mlt(3, "left").order == 128
    assert onesided_mlt(3, "right").order == 128
    left = onesided_inn(3, "left").closure
    right = onesided_inn(3, "right").closure
    assert left.same_elements(right)


def test_onesided_inn_is_stabilizer_of_onesided_mlt():
    for side in ("left", "right"):
        cl = onesided_mlt(3, side).closure
        assert stabilizer_of_identity(cl).same_elements(
            onesided_inn(3, side).closure
        )


def test_rank_orders_n5_n6():
    assert inn_group(5, "rank").order == 1 << 30
    assert inn_group(6, "rank").order == 1 << 62
    assert onesided_inn(5, "left", "rank").order == 1 << 15
    assert onesided_inn(6, "left", "rank").order == 1 << 31
    assert mlt_group(5, "rank").order == (1 << 6) * (1 << 30)


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        mlt_group(3, "exhaustive", cap=100)


# ---------------------------------------------------------------------------
# Normality and intersections inside Mlt(Q_3).

def test_n_normal_in_mlt_q3():
    cl = mlt_group(3).closure
    N = build_N(3)
    assert is_normal_in(N.closure, cl)
    K = build_K(3)
    kcl = closure(K.generators)
    assert len(kcl) == 8
    assert len(intersection(N.closure, kcl)) == 1


# ---------------------------------------------------------------------------
# Mirror conjugation.

def test_mirror_involution_and_generator_action():
    for n in (2, 3, 4, 5, 6):
        J = mirror_conjugator(n)
        assert compose(J, J).is_identity()
        for x in cdcore.elements(n):
            lhs = compose(J, compose(left_translation(n, x), J))
            assert lhs == right_translation(n, cdcore.inv(x))


def test_translation_is_not_elem_abelian_generator():
    # L_{i1} has order 4, so it cannot generate an elementary abelian 2-group
    assert not permgroup.is_elem_abelian_2([left_translation(3, el(3, "i1"))])


def test_mirror_oracle_via_element_arithmetic():
    # J L_{i1} J = R_{-i1} in Q_3, checked pointwise through mul/inv
    n = 3
    J = mirror_conjugator(n)
    lhs = compose(J, compose(left_translation(n, el(n, "i1")), J))
    rhs = right_translation(n, el(n, "-i1"))
    assert lhs == rhs
    for x in cdcore.elements(n):
        got = cdcore.inv(mul(el(n, "i1"), cdcore.inv(x)))
        assert got == mul(x, el(n, "-i1"))


def test_mirror_conjugates_mlt_l_to_mlt_r():
    n = 3
    J = mirror_conjugator(n)
    ml = onesided_mlt(n, "left").closure
    mr = onesided_mlt(n, "right").closure
    assert permgroup.conjugate_by(J, ml).same_elements(mr)


# ---------------------------------------------------------------------------
# K construction.

def test_k_sets_base_and_growth():
    s = k_sets(2)
    assert s[1] == frozenset({0b00, 0b10})
    assert s[2] == frozenset({0b00, 0b11})
    s3 = k_sets(3)
    assert s3[1] == frozenset({0b000, 0b010, 0b100, 0b110})
    assert s3[3] == frozenset({0b000, 0b011, 0b101, 0b110})


def test_k_generators_q2_explicit():
    K = build_K(2)
    g12 = K.generators[0]
    # (1,-i1)(-1,i1)(i2,-i1i2)(-i2,i1i2)
    expect = {
        idx(2, "1"): idx(2, "-i1"),
        idx(2, "-1"): idx(2, "i1"),
        idx(2, "i2"): idx(2, "-i1i2"),
        idx(2, "-i2"): idx(2, "i1i2"),
    }
    for src, dst in expect.items():
        assert g12(src) == dst and g12(dst) == src


def test_k_generator_q3_images():
    K = build_K(3)
    g13 = K.generators[0]
    assert g13(idx(3, "1")) == idx(3, "-i1")
    assert g13(idx(3, "i2i3")) == idx(3, "i1i2i3")  # (i1i2)i3 = +i1i2i3


def test_k_orders_and_transversal():
    for n in (2, 3, 4, 5, 6):
        K = build_K(n)
        assert K.order == 1 << n
        assert permgroup.is_elem_abelian_2(K.generators)
        half = 1 << n
        classes = {g(0) % half for g in k_elements(K)}
        assert len(classes) == 1 << n
        for k, g in enumerate(K.generators, start=1):
            assert perm_order(g) == 2
            assert g(0) % half == 1 << (k - 1)


def test_k_closure_matches_subset_products():
    K = build_K(3)
    cl = closure(K.generators)
    assert len(cl) == 8
    for g in k_elements(K):
        assert g in cl


# ---------------------------------------------------------------------------
# N construction.

def test_build_n_small():
    N2 = build_N(2)
    assert N2.basis.rank == 3 and N2.order == 8
    N3 = build_N(3)
    assert N3.basis.rank == 7 and N3.order == 128
    assert len(N3.closure) == 128
    # N = Inn u (-Inn)
    inn = inn_group(3).closure
    lm = left_translation(3, minus_one(3))
    rows = {inn.elements[i].tobytes() for i in range(len(inn))}
    rows |= {
        lm.images.astype(np.uint8)[inn.elements[i]].tobytes()
        for i in range(len(inn))
    }
    assert rows == N3.closure._byteset


def test_n_basis_members_are_the_stated_flips():
    n = 3
    N = build_N(n)
    e = idx(n, "i3")
    lm_te = compose(left_translation(n, minus_one(n)), inner_T(n, el(n, "i3")))
    v = flip_decompose(lm_te)
    assert v.bits == 1 | (1 << e)  # (1,-1)(e,-e)
    assert N.basis.contains(v)


# ---------------------------------------------------------------------------
# Semidirect certificates.

def test_semidirect_two_sided():
    for n, orders in ((2, (32, 8, 4)), (3, (1024, 128, 8))):
        cert = verify_semidirect(mlt_group(n), build_N(n), build_K(n))
        assert cert.valid and cert.k_in_g
        assert (cert.order_g, cert.order_n, cert.order_k) == orders


def test_semidirect_rank_mode():
    for n in (5, 6):
        cert = verify_semidirect(
            mlt_group(n, "rank"), build_N(n, "rank"), build_K(n)
        )
        assert cert.valid and cert.k_in_g
        assert cert.order_n * cert.order_k == cert.order_g


def test_semidirect_onesided():
    cert3 = verify_semidirect_onesided(3)
    assert cert3.valid and cert3.k_in_g
    assert (cert3.order_g, cert3.order_n, cert3.order_k) == (128, 16, 8)
    cert4 = verify_semidirect_onesided(4)
    assert cert4.valid and cert4.k_in_g
    assert (cert4.order_g, cert4.order_n, cert4.order_k) == (4096, 256, 16)
    cert2 = verify_semidirect_onesided(2)
    assert cert2.valid  # order bookkeeping holds ...
    assert cert2.k_in_g is False  # ... but K genuinely sits outside Mlt_l(Q_2)
    for n in (5, 6):
        cert = verify_semidirect_onesided(n, "rank")
        assert cert.valid and cert.k_in_g


def test_k2_outside_mlt_l_q2_directly():
    # Mlt_l(H_8) is the left regular image {L_g}; g_{1,2} is not one of them
    K = build_K(2)
    ml = onesided_mlt(2, "left").closure
    assert len(ml) == 8
    assert K.generators[0] not in ml


# ---------------------------------------------------------------------------
# h mapping.

def test_h_mapping_flips_upper_halves():
    h4 = h_mapping(4)
    v = flip_decompose(h4)
    assert v.weight == 8
    assert all(v.bits >> cls & 1 for cls in range(8, 16))
    assert compose(h4, h4).is_identity()
    h5 = h_mapping(5)
    assert flip_decompose(h5).weight == 16


def test_h_mapping_requires_n4():
    with pytest.raises(ValueError):
        h_mapping(3)
