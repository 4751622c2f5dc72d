"""Exact arithmetic in R = Q(zeta_m)[s]/(s^2 - q).

Every scalar the workbench produces -- character values, Bessel values,
gamma factors, Kloosterman sums -- lives in this ring.  m = lcm(p, q^2-1)
so that one context holds the additive character values (order p), the
GL_1 multiplicative characters (order q-1) and the GL_2 cuspidal
parameters (order q^2-1).  Adjoining a formal square root of q keeps the
half-integer normalizations of the gamma factors exact and closed under
addition.

Elements are stored as two coefficient vectors of length phi(m) over
Fraction (the s^0 and s^1 components) in the power basis
1, zeta, ..., zeta^{phi-1}, fully reduced mod the cyclotomic polynomial
Phi_m.  Division is deliberately restricted: by nonzero rationals and by
powers of sqrt(q) (x * s / q).  Nothing here ever touches floating point
except the report-only complex embedding.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

MAX_M = 4096  # safety bound on the root-of-unity order


# ---------------------------------------------------------------------------
# cyclotomic polynomial and reduction table
# ---------------------------------------------------------------------------

def _poly_divide_exact(num: list[int], den: list[int]) -> list[int]:
    """Quotient of integer polynomials known to divide exactly.

    Coefficient lists are little-endian (index = exponent).
    """
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("non-exact polynomial division")
        c //= den[-1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("non-exact polynomial division")
    return out


def cyclotomic_poly(m: int) -> list[int]:
    """Integer coefficients of Phi_m, little-endian."""
    # x^m - 1 = prod_{d | m} Phi_d
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divide_exact(poly, cyclotomic_poly(d))
    return poly


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """q = p^e with p prime, else ValueError.  Returns (p, e)."""
    for p in range(2, q + 1):
        if not _is_prime(p):
            continue
        if q % p == 0:
            e = 0
            r = q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, e
    raise ValueError(f"{q} is not a prime power")


class CycloContext:
    """Reduction data for Q(zeta_m)[sqrt q], m = lcm(p, q^2 - 1)."""

    def __init__(self, q: int):
        p, e = factor_prime_power(q)
        m = lcm(p, q * q - 1)
        if m > MAX_M:
            raise ValueError(f"root-of-unity order {m} exceeds bound {MAX_M}")
        phi_poly = cyclotomic_poly(m)
        phi = len(phi_poly) - 1
        # rewrite x^j (0 <= j < m) as integer vectors in the power basis
        red: list[tuple[int, ...]] = []
        for j in range(phi):
            row = [0] * phi
            row[j] = 1
            red.append(tuple(row))
        for j in range(phi, m):
            # x^j = x * x^{j-1} reduced
            prev = red[j - 1]
            row = [0] + list(prev[:-1])
            top = prev[-1]
            if top:
                for i in range(phi):
                    row[i] -= top * phi_poly[i]
            red.append(tuple(row))
        # products of two basis monomials stay below degree 2*phi-1; the
        # table must cover them after folding exponents mod m
        if 2 * phi - 2 >= m:
            raise ValueError(f"unexpected basis overflow for m={m}")
        self.q = q
        self.p = p
        self.deg = e
        self.m = m
        self.phi = phi
        self.phi_poly = tuple(phi_poly)
        self.reduction = tuple(red)
        zero = tuple([Fraction(0)] * phi)
        one = tuple([Fraction(1)] + [Fraction(0)] * (phi - 1))
        self.zero = ScaledCyclotomic(self, zero, zero)
        self.one = ScaledCyclotomic(self, one, zero)
        self.sqrt_q = ScaledCyclotomic(self, zero, one)

    def __repr__(self) -> str:
        return f"CycloContext(q={self.q}, m={self.m}, phi={self.phi})"

    # -- constructors -------------------------------------------------------

    def from_rational(self, a) -> ScaledCyclotomic:
        v = [Fraction(0)] * self.phi
        v[0] = Fraction(a)
        z = tuple([Fraction(0)] * self.phi)
        return ScaledCyclotomic(self, tuple(v), z)

    def zeta_pow(self, j: int) -> ScaledCyclotomic:
        """zeta_m^j as a ring element."""
        row = self.reduction[j % self.m]
        z = tuple([Fraction(0)] * self.phi)
        return ScaledCyclotomic(self, tuple(Fraction(c) for c in row), z)

    def root_of_unity(self, k: int, j: int = 1) -> ScaledCyclotomic:
        """zeta_k^j where k must divide m."""
        if k <= 0 or self.m % k != 0:
            raise ValueError(f"order {k} does not divide m={self.m}")
        return self.zeta_pow((self.m // k) * j)

    def q_half_power(self, j: int) -> ScaledCyclotomic:
        """q^{j/2} for any integer j (negative allowed)."""
        half = j % 2
        whole = (j - half) // 2
        val = self.from_rational(Fraction(self.q) ** whole)
        if half:
            val = val * self.sqrt_q
        return val


def make_context(q: int) -> CycloContext:
    return CycloContext(q)


# ---------------------------------------------------------------------------
# ring elements
# ---------------------------------------------------------------------------

def _vec_add(x, y):
    return tuple(a + b for a, b in zip(x, y))


def _vec_sub(x, y):
    return tuple(a - b for a, b in zip(x, y))


def _vec_scale(x, c):
    return tuple(a * c for a in x)


@dataclass(frozen=True)
class ScaledCyclotomic:
    """a(zeta) + b(zeta) * sqrt(q), coefficients reduced mod Phi_m."""

    ctx: CycloContext
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]

    # -- ring structure -----------------------------------------------------

    def _check(self, other: ScaledCyclotomic) -> None:
        if self.ctx is not other.ctx:
            raise ValueError("mixed CycloContext arithmetic")

    def __add__(self, other: ScaledCyclotomic) -> ScaledCyclotomic:
        self._check(other)
        return ScaledCyclotomic(self.ctx, _vec_add(self.a, other.a),
                                _vec_add(self.b, other.b))

    def __sub__(self, other: ScaledCyclotomic) -> ScaledCyclotomic:
        self._check(other)
        return ScaledCyclotomic(self.ctx, _vec_sub(self.a, other.a),
                                _vec_sub(self.b, other.b))

    def __neg__(self) -> ScaledCyclotomic:
        return ScaledCyclotomic(self.ctx, _vec_scale(self.a, -1),
                                _vec_scale(self.b, -1))

    def __mul__(self, other: ScaledCyclotomic) -> ScaledCyclotomic:
        self._check(other)
        ctx = self.ctx
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        # (a1 + b1 s)(a2 + b2 s) = (a1 a2 + q b1 b2) + (a1 b2 + b1 a2) s
        aa = _vec_add(_poly_mul_reduced(ctx, a1, a2),
                      _vec_scale(_poly_mul_reduced(ctx, b1, b2), ctx.q))
        bb = _vec_add(_poly_mul_reduced(ctx, a1, b2),
                      _poly_mul_reduced(ctx, b1, a2))
        return ScaledCyclotomic(ctx, aa, bb)

    def scale(self, c) -> ScaledCyclotomic:
        """Multiply by an exact rational."""
        c = Fraction(c)
        return ScaledCyclotomic(self.ctx, _vec_scale(self.a, c),
                                _vec_scale(self.b, c))

    def div_by_int(self, n: int) -> ScaledCyclotomic:
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return self.scale(Fraction(1, n))

    def div_by_sqrt_q(self) -> ScaledCyclotomic:
        """x / sqrt(q) = x * s / q."""
        return (self * self.ctx.sqrt_q).scale(Fraction(1, self.ctx.q))

    def conj(self) -> ScaledCyclotomic:
        """zeta -> zeta^{-1}; fixes sqrt(q)."""
        ctx = self.ctx
        return ScaledCyclotomic(ctx, _conj_vec(ctx, self.a),
                                _conj_vec(ctx, self.b))

    # -- predicates and views -----------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.a) and not any(self.b)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def as_rational(self) -> Fraction:
        """The value as an exact rational, or ValueError if it is not one."""
        if any(self.a[1:]) or any(self.b):
            raise ValueError("value is not rational")
        return self.a[0]

    def to_complex_approx(self) -> tuple[float, float]:
        """Float embedding zeta_m -> e^{2 pi i/m}, s -> +sqrt(q).

        Report rendering only; never feeds an assertion.
        """
        ctx = self.ctx
        z = cmath.exp(2j * cmath.pi / ctx.m)
        total = 0j
        s = ctx.q ** 0.5
        for j in range(ctx.phi):
            if self.a[j] or self.b[j]:
                w = z ** j
                total += complex(float(self.a[j]) + float(self.b[j]) * s,
                                 0.0) * w
        return (total.real, total.imag)

    def __repr__(self) -> str:
        re, im = self.to_complex_approx()
        return f"<cyclo ~({re:+.6f}{im:+.6f}j) m={self.ctx.m}>"

    # -- serialization -------------------------------------------------------

    def serialize(self) -> dict:
        return {
            "m": self.ctx.m,
            "q": self.ctx.q,
            "a": [f"{c.numerator}/{c.denominator}" for c in self.a],
            "b": [f"{c.numerator}/{c.denominator}" for c in self.b],
        }


def deserialize(ctx: CycloContext, data: dict) -> ScaledCyclotomic:
    if data["m"] != ctx.m or data["q"] != ctx.q:
        raise ValueError("serialized value belongs to a different context")
    a = tuple(Fraction(s) for s in data["a"])
    b = tuple(Fraction(s) for s in data["b"])
    if len(a) != ctx.phi or len(b) != ctx.phi:
        raise ValueError("coefficient vector length mismatch")
    return ScaledCyclotomic(ctx, a, b)


def _poly_mul_reduced(ctx: CycloContext, x, y):
    """Product of two coefficient vectors, reduced mod Phi_m."""
    phi = ctx.phi
    out = [Fraction(0)] * phi
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j, yj in enumerate(y):
            if not yj:
                continue
            e = i + j
            c = xi * yj
            if e < phi:
                out[e] += c
            else:
                row = ctx.reduction[e % ctx.m]
                for t in range(phi):
                    if row[t]:
                        out[t] += c * row[t]
    return tuple(out)


def _conj_vec(ctx: CycloContext, x):
    out = [Fraction(0)] * ctx.phi
    for j, xj in enumerate(x):
        if not xj:
            continue
        row = ctx.reduction[(-j) % ctx.m]
        for t in range(ctx.phi):
            if row[t]:
                out[t] += xj * row[t]
    return tuple(out)
