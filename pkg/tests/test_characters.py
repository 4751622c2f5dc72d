"""Character-theory oracles: orthogonality, induction, Speh blocks."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from glgamma.characters import (Cusp2Datum, Cuspidal2, DetTwist, GL1Datum,
                                InducedCuspidals, PrincipalSeriesRegular,
                                SteinbergTwist, UnsupportedRepError,
                                central_exponent, char_of_repspec,
                                cuspidal2_char, cuspidal_support,
                                dettwist_char, dual_spec, get_ring, gl1_char,
                                induced_char, inner_product,
                                inner_product_int, omega_minus_one,
                                parse_cuspidal_data, parse_rep_spec,
                                spec_degree, speh2_of_cusp2, speh_block_char,
                                supports_disjoint)
from glgamma.glclasses import get_group, mat_inv, mat_mul

# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _brute_induced_borel_gl2(q: int, a0: int, a1: int):
    """Frobenius formula for Ind_B^G(alpha_a0 x alpha_a1), brute force."""
    ctx = get_group(q, 2)
    F = ctx.F
    ring = get_ring(q)
    mats = ctx.enumerate_group()
    invs = [mat_inv(F, m) for m in mats]
    borel_order = (q - 1) ** 2 * q
    vals = []
    for info in ctx.classes:
        total = ring.zero
        for x, xi in zip(mats, invs):
            m = mat_mul(F, mat_mul(F, x, info.rep), xi)
            if m[1, 0] == 0:
                term = ring.root_of_unity(q - 1, a0 * F.dlog[m[0, 0]]) * \
                    ring.root_of_unity(q - 1, a1 * F.dlog[m[1, 1]])
                total = total + term
        vals.append(total.scale(Fraction(1, borel_order)))
    return vals

# ---------------------------------------------------------------------------
# one-dimensional and cuspidal characters
# ---------------------------------------------------------------------------

def test_gl1_orthogonality():
    ring = get_ring(3)
    a0 = gl1_char(ring, 3, 0)
    a1 = gl1_char(ring, 3, 1)
    assert inner_product_int(a0, a0) == 1
    assert inner_product_int(a1, a1) == 1
    assert inner_product(a0, a1).is_zero()
    # alpha_1(2) = -1 over F_3
    assert a1.evaluate(np.array([[2]])).as_rational() == -1

def test_dettwist_basics():
    ring = get_ring(3)
    cf = dettwist_char(ring, 3, 2, 1)
    assert cf.dim() == 1
    assert inner_product_int(cf, cf) == 1
    w = np.array([[0, 1], [1, 0]], dtype=np.int64)
    assert cf.evaluate(w).as_rational() == -1  # det = -1

def test_cuspidal2_gl2_f2_is_sign_character():
    cf = cuspidal2_char(2, 1)
    assert cf.dim() == 1
    # classes: identity, transvection, elliptic -> 1, -1, 1
    got = [v.as_rational() for v in cf.values]
    assert got == [1, -1, 1]

def test_cuspidal2_gl2_f3_values():
    cf = cuspidal2_char(3, 1)
    assert cf.dim() == 2
    minus_id = 2 * np.eye(2, dtype=np.int64)
    assert cf.evaluate(minus_id).as_rational() == -2
    # eigenvalue of multiplicative order 4 (charpoly x^2 + 1):
    #   -(zeta_8^2 + zeta_8^6) = 0
    ctx = get_group(3, 2)
    lab_i = (((1, 0, 1), (1,)),)
    assert cf.values[ctx.label_to_index[lab_i]].is_zero()
    # eigenvalue gen2 of order 8 (charpoly x^2 + x + 2):
    #   -(zeta_8 + zeta_8^3) = -i*sqrt(2)
    lab_g = (((2, 1, 1), (1,)),)
    re, im = cf.values[ctx.label_to_index[lab_g]].to_complex_approx()
    assert abs(re) < 1e-9
    assert abs(abs(im) - 2 ** 0.5) < 1e-9

def test_cuspidal2_regularity_and_equivalence():
    with pytest.raises(ValueError):
        cuspidal2_char(3, 4)  # 4*3 = 12 = 4 mod 8: not regular
    with pytest.raises(ValueError):
        cuspidal2_char(3, 0)
    a = cuspidal2_char(3, 1)
    b = cuspidal2_char(3, 3)  # t and t*q give the same character
    for x, y in zip(a.values, b.values):
        assert (x - y).is_zero()
    c = cuspidal2_char(3, 2)
    assert inner_product(a, c).is_zero()

def test_cuspidal2_dettwist_relation():
    # twisting by alpha_a(det) shifts t by a(q+1)
    a = cuspidal2_char(3, 1).twist_by_det(1)
    b = cuspidal2_char(3, 1 + 4)
    for x, y in zip(a.values, b.values):
        assert (x - y).is_zero()

# ---------------------------------------------------------------------------
# induction
# ---------------------------------------------------------------------------

def test_projective_line_permutation_character():
    ring = get_ring(2)
    triv = gl1_char(ring, 2, 0)
    cf = induced_char(ring, 2, (1, 1), [triv, triv])
    assert [v.as_rational() for v in cf.values] == [3, 1, 0]
    assert inner_product_int(cf, cf) == 2

def test_induced_matches_frobenius_brute_force():
    ring = get_ring(3)
    for a0, a1 in ((0, 1), (1, 1), (0, 0), (1, 0)):
        cf = induced_char(ring, 3, (1, 1),
                          [gl1_char(ring, 3, a0), gl1_char(ring, 3, a1)])
        brute = _brute_induced_borel_gl2(3, a0, a1)
        for x, y in zip(cf.values, brute):
            assert (x - y).is_zero()

def test_induction_order_independence():
    ring = get_ring(3)
    c2 = cuspidal2_char(3, 1)
    g1 = gl1_char(ring, 3, 0)
    a = induced_char(ring, 3, (2, 1), [c2, g1])
    b = induced_char(ring, 3, (1, 2), [g1, c2])
    for x, y in zip(a.values, b.values):
        assert (x - y).is_zero()
    assert inner_product_int(a, a) == 1

def test_principal_series_and_steinberg():
    ps = char_of_repspec(3, PrincipalSeriesRegular((0, 1)))
    assert ps.dim() == 4
    st = char_of_repspec(3, SteinbergTwist(0))
    assert st.dim() == 3
    assert inner_product(ps, st).is_zero()
    with pytest.raises(ValueError):
        char_of_repspec(3, PrincipalSeriesRegular((0, 0)))
    with pytest.raises(ValueError):
        char_of_repspec(2, PrincipalSeriesRegular((0, 1)))

def test_induced_cuspidals_gl3():
    spec = InducedCuspidals((Cusp2Datum(1), GL1Datum(0)))
    cf = char_of_repspec(2, spec)
    assert cf.dim() == 7
    assert inner_product_int(cf, cf) == 1
    with pytest.raises(ValueError):
        char_of_repspec(3, InducedCuspidals((Cusp2Datum(1), Cusp2Datum(3))))

# ---------------------------------------------------------------------------
# Speh blocks
# ---------------------------------------------------------------------------

def test_speh2_gl4_f2():
    sp = speh2_of_cusp2(2, 1)
    assert sp.dim() == 7
    assert inner_product_int(sp, sp) == 1
    ring = get_ring(2)
    sigma = cuspidal2_char(2, 1)
    ind = induced_char(ring, 2, (2, 2), [sigma, sigma])
    assert ind.dim() == 35
    other = ind - sp
    assert other.dim() == 28
    assert inner_product_int(other, other) == 1
    assert inner_product(sp, other).is_zero()

def test_speh2_gl4_f3():
    sp = speh2_of_cusp2(3, 1)
    assert sp.dim() == 52
    assert inner_product_int(sp, sp) == 1

def test_speh_block_dispatch():
    ring = get_ring(3)
    bl = speh_block_char(3, GL1Datum(1), 3)
    assert bl.dim() == 1
    assert bl.ctx.n == 3
    c1 = speh_block_char(3, Cusp2Datum(1), 1)
    assert c1.dim() == 2
    with pytest.raises(UnsupportedRepError):
        speh_block_char(3, Cusp2Datum(1), 3)

# ---------------------------------------------------------------------------
# spec helpers
# ---------------------------------------------------------------------------

def test_spec_helpers():
    assert spec_degree(PrincipalSeriesRegular((0, 1, 2))) == 3
    assert spec_degree(InducedCuspidals((Cusp2Datum(1), GL1Datum(0)))) == 3
    assert dual_spec(Cuspidal2(1)) == Cuspidal2(-1)
    assert dual_spec(PrincipalSeriesRegular((0, 1))) == \
        PrincipalSeriesRegular((0, -1))
    assert cuspidal_support(3, Cuspidal2(1)) == cuspidal_support(
        3, Cuspidal2(3))
    assert supports_disjoint(3, Cuspidal2(1), Cuspidal2(2))
    assert not supports_disjoint(3, Cuspidal2(1), Cuspidal2(3))
    assert not supports_disjoint(
        3, PrincipalSeriesRegular((0, 1)), DetTwist(2, 1))
    assert central_exponent(3, Cuspidal2(1)) == 1
    ring = get_ring(3)
    assert omega_minus_one(ring, 3, Cuspidal2(1)).as_rational() == -1
    assert omega_minus_one(ring, 3, Cuspidal2(2)).as_rational() == 1
    assert omega_minus_one(get_ring(2), 2, Cuspidal2(1)).as_rational() == 1

def test_parse_rep_spec():
    assert parse_rep_spec("ps:0,1") == PrincipalSeriesRegular((0, 1))
    assert parse_rep_spec("det:2", n=3) == DetTwist(3, 2)
    assert parse_rep_spec("st:1") == SteinbergTwist(1)
    assert parse_rep_spec("cusp2:t=1") == Cuspidal2(1)
    assert parse_rep_spec("cusp2:1") == Cuspidal2(1)
    assert parse_rep_spec("ind:cusp2:1+gl1:0") == InducedCuspidals(
        (Cusp2Datum(1), GL1Datum(0)))
    assert parse_cuspidal_data("gl1:0+cusp2:1") == \
        (GL1Datum(0), Cusp2Datum(1))
    with pytest.raises(ValueError):
        parse_rep_spec("det:2")
    with pytest.raises(ValueError):
        parse_rep_spec("bogus:1")

def test_character_determinism():
    a = char_of_repspec(3, Cuspidal2(1))
    b = char_of_repspec(3, Cuspidal2(1))
    assert a is b
    first = [v.serialize() for v in a.values]
    second = [v.serialize() for v in char_of_repspec(3, Cuspidal2(1)).values]
    assert first == second
