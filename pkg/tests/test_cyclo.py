"""Exact-ring tests: contexts, reduction, ring axioms, conjugation."""
from __future__ import annotations

import random
from fractions import Fraction

import pytest

from glgamma.cyclo import (CycloContext, cyclotomic_poly, deserialize,
                           factor_prime_power, make_context)


def test_context_orders():
    assert (make_context(3).m, make_context(3).phi) == (24, 8)
    assert (make_context(2).m, make_context(2).phi) == (6, 2)
    assert (make_context(5).m, make_context(5).phi) == (120, 32)
    assert (make_context(4).m, make_context(4).phi) == (30, 8)


def test_prime_power_detection():
    assert factor_prime_power(8) == (2, 3)
    assert factor_prime_power(9) == (3, 2)
    assert factor_prime_power(13) == (13, 1)
    with pytest.raises(ValueError):
        factor_prime_power(6)
    with pytest.raises(ValueError):
        factor_prime_power(1)


def test_cyclotomic_polynomials():
    # little-endian coefficient lists against hand values
    assert cyclotomic_poly(1) == [-1, 1]
    assert cyclotomic_poly(2) == [1, 1]
    assert cyclotomic_poly(6) == [1, -1, 1]
    assert cyclotomic_poly(8) == [1, 0, 0, 0, 1]
    assert cyclotomic_poly(24) == [1, 0, 0, 0, -1, 0, 0, 0, 1]


def test_basic_root_identities():
    ctx = make_context(2)  # m = 6
    z3 = ctx.root_of_unity(3)
    one = ctx.one
    assert z3 + ctx.root_of_unity(3, 2) == -one
    assert z3 * z3 * z3 == one
    ctx3 = make_context(3)  # m = 24
    z8 = ctx3.root_of_unity(8)
    minus_one = -ctx3.one
    assert z8 * z8 * z8 * z8 == minus_one
    assert ctx3.root_of_unity(8, 4) == minus_one
    assert ctx3.root_of_unity(1, 0) == ctx3.one


def test_sqrt_q_relations():
    for q in (2, 3, 5, 7, 4):
        ctx = make_context(q)
        s = ctx.sqrt_q
        assert s * s == ctx.from_rational(q)
        assert s.div_by_sqrt_q() == ctx.one
        one_plus = ctx.one + s
        one_minus = ctx.one - s
        assert one_plus * one_minus == ctx.from_rational(1 - q)
        assert ctx.q_half_power(3) == ctx.from_rational(q) * s
        assert ctx.q_half_power(-2) == ctx.from_rational(Fraction(1, q))
        assert ctx.q_half_power(-1) * s == ctx.one


def _random_element(ctx, rng, density=3):
    x = ctx.zero
    for _ in range(density):
        j = rng.randrange(ctx.m)
        c = Fraction(rng.randrange(-4, 5), rng.randrange(1, 5))
        term = ctx.zeta_pow(j).scale(c)
        if rng.random() < 0.5:
            term = term * ctx.sqrt_q
        x = x + term
    return x


def test_ring_axioms_seeded():
    rng = random.Random(20260817)
    for q in (2, 3, 4):
        ctx = make_context(q)
        for _ in range(25):
            x = _random_element(ctx, rng)
            y = _random_element(ctx, rng)
            z = _random_element(ctx, rng)
            assert (x + y) + z == x + (y + z)
            assert x + y == y + x
            assert (x * y) * z == x * (y * z)
            assert x * y == y * x
            assert x * (y + z) == x * y + x * z
            assert x * ctx.one == x
            assert x + (-x) == ctx.zero


def test_conj_is_ring_involution():
    rng = random.Random(7)
    ctx = make_context(3)
    for _ in range(20):
        x = _random_element(ctx, rng)
        y = _random_element(ctx, rng)
        assert x.conj().conj() == x
        assert (x + y).conj() == x.conj() + y.conj()
        assert (x * y).conj() == x.conj() * y.conj()
    assert ctx.sqrt_q.conj() == ctx.sqrt_q
    # u * conj(u) = 1 for roots of unity
    for k in (1, 2, 3, 8, 24):
        for j in range(k):
            u = ctx.root_of_unity(k, j)
            assert u * u.conj() == ctx.one
    # real combination squared: (z8 + z8^-1)^2 = 2
    z8 = ctx.root_of_unity(8)
    r = z8 + z8.conj()
    assert r * r == ctx.from_rational(2)
    assert r.conj() == r


def test_reduction_below_phi():
    ctx = make_context(3)  # Phi_24 = x^8 - x^4 + 1, so zeta^8 = zeta^4 - 1
    assert ctx.zeta_pow(8) == ctx.zeta_pow(4) - ctx.one
    assert ctx.zeta_pow(24) == ctx.one
    assert ctx.zeta_pow(25) == ctx.zeta_pow(1)


def test_rational_view_and_serialization():
    ctx = make_context(3)
    x = ctx.from_rational(Fraction(-7, 3))
    assert x.as_rational() == Fraction(-7, 3)
    with pytest.raises(ValueError):
        (ctx.sqrt_q + ctx.one).as_rational()
    rng = random.Random(99)
    for _ in range(10):
        v = _random_element(ctx, rng)
        again = deserialize(ctx, v.serialize())
        assert again == v
    with pytest.raises(ValueError):
        deserialize(make_context(2), ctx.one.serialize())


def test_complex_embedding_rendering_only():
    ctx = make_context(3)
    re, im = ctx.one.to_complex_approx()
    assert abs(re - 1.0) < 1e-12 and abs(im) < 1e-12
    re, im = ctx.root_of_unity(4).to_complex_approx()
    assert abs(re) < 1e-12 and abs(im - 1.0) < 1e-12
    re, im = ctx.sqrt_q.to_complex_approx()
    assert abs(re - 3 ** 0.5) < 1e-12


def test_context_mixing_rejected():
    with pytest.raises(ValueError):
        make_context(2).one + make_context(3).one


def test_determinism():
    first = make_context(3).root_of_unity(8, 5).serialize()
    second = make_context(3).root_of_unity(8, 5).serialize()
    assert first == second
