"""F_q and F_{q^2} arithmetic on packed integer elements.

Elements of F_q = F_p[t]/(modulus) are the integers 0..q-1, packed by
base-p digits (x = sum digit_i * p^i  <->  sum digit_i * t^i); the
modulus is the lexicographically smallest irreducible monic (by
ascending-exponent coefficient tuple).  F_{q^2} = F_q[u]/(u^2+c1*u+c0)
likewise packs a + b*u as a + b*q, so embedding F_q is the identity on
packed values.  All arithmetic is table-driven; the tables are numpy
arrays so group-scale code can gather through them.

Generator convention: the F_{q^2} generator is the smallest packed value
of full order, and the F_q generator is gen2^(q+1).  This makes
dlog2(embed(x)) = (q+1) * dlog(x), which keeps GL_2-cuspidal central
characters and GL_1 characters on one exponent scale.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .cyclo import factor_prime_power

NMAX = 6  # largest matrix size anywhere in the workbench


# ---------------------------------------------------------------------------
# polynomials over F_p (context construction only)
# ---------------------------------------------------------------------------

def _fp_poly_mulmod(f, g, modulus, p):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    # reduce by monic modulus
    d = len(modulus) - 1
    for i in range(len(out) - 1, d - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(d):
                out[i - d + j] = (out[i - d + j] - c * modulus[j]) % p
    out = out[:d]
    out += [0] * (d - len(out))
    return out


def _fp_irreducible(poly, p):
    """Trial-division irreducibility for small monic polys over F_p."""
    d = len(poly) - 1
    for dd in range(1, d // 2 + 1):
        for tail in product(range(p), repeat=dd):
            g = list(tail) + [1]
            # divide poly by g, check zero remainder
            rem = list(poly)
            for i in range(len(rem) - 1, dd - 1, -1):
                c = rem[i]
                if c:
                    rem[i] = 0
                    for j in range(dd):
                        rem[i - dd + j] = (rem[i - dd + j] - c * g[j]) % p
            if not any(rem[:dd]):
                return False
    return True


def _smallest_irreducible(p, d):
    # ascending-exponent tuple (c_0, ..., c_{d-1}), then leading 1
    for tail in product(range(p), repeat=d):
        poly = list(tail) + [1]
        if _fp_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("no irreducible found")


# ---------------------------------------------------------------------------
# contexts
# ---------------------------------------------------------------------------

class ExtContext:
    """F_{q^2} over F_q: packed elements a + b*q, tables over 0..q^2-1."""

    def __init__(self, base: FieldContext):
        q = base.q
        q2 = q * q
        self.base = base
        self.q2 = q2
        # smallest irreducible monic quadratic u^2 + c1 u + c0 over F_q
        mod2 = None
        for c0 in range(q):
            for c1 in range(q):
                if _fq_quadratic_irreducible(base, c0, c1):
                    mod2 = (c0, c1, 1)
                    break
            if mod2:
                break
        assert mod2 is not None
        self.modulus = mod2
        c0, c1, _ = mod2
        nc0 = base.neg[c0]
        nc1 = base.neg[c1]
        a1, b1 = np.arange(q2)[:, None] % q, np.arange(q2)[:, None] // q
        a2, b2 = np.arange(q2)[None, :] % q, np.arange(q2)[None, :] // q
        mul, add = base.mul, base.add
        bb = mul[b1, b2]
        re = add[mul[a1, a2], mul[bb, nc0]]
        im = add[add[mul[a1, b2], mul[b1, a2]], mul[bb, nc1]]
        self.mul2 = (re + q * im).astype(np.int64)
        self.add2 = (add[a1, a2] + q * add[b1, b2]).astype(np.int64)
        self.neg2 = (base.neg[np.arange(q2) % q]
                     + q * base.neg[np.arange(q2) // q]).astype(np.int64)
        # generator: smallest packed value of multiplicative order q^2 - 1
        self.gen2 = _find_generator(self.mul2, q2)
        self.exp2, self.dlog2 = _power_tables(self.mul2, self.gen2, q2)
        self.inv2 = np.zeros(q2, dtype=np.int64)
        nz = np.arange(1, q2)
        self.inv2[nz] = self.exp2[(-self.dlog2[nz]) % (q2 - 1)]
        # Frobenius x -> x^q and trace to F_q
        self.frob = np.zeros(q2, dtype=np.int64)
        self.frob[self.exp2] = self.exp2[(self.dlog2[self.exp2] * q)
                                         % (q2 - 1)]
        self.trace_to_base = np.array(
            [_as_base(self.add2[x, self.frob[x]], q) for x in range(q2)],
            dtype=np.int64)


def _as_base(x: int, q: int) -> int:
    if x >= q:
        raise AssertionError(f"value {x} not in base field")
    return x


def _fq_quadratic_irreducible(base: FieldContext, c0: int, c1: int) -> bool:
    # u^2 + c1 u + c0 has no root in F_q
    for x in range(base.q):
        v = base.add[base.mul[x, x], base.add[base.mul[c1, x], c0]]
        if v == 0:
            return False
    return True


def _find_generator(mul, n):
    for g in range(2, n):
        x = g
        order = 1
        while x != 1:
            x = mul[x, g]
            order += 1
            if order > n:
                raise AssertionError("broken multiplication table")
        if order == n - 1:
            return g
    raise AssertionError("no generator found")


def _power_tables(mul, gen, n):
    exp = np.zeros(n - 1, dtype=np.int64)
    dlog = np.full(n, -1, dtype=np.int64)
    x = 1
    for j in range(n - 1):
        exp[j] = x
        dlog[x] = j
        x = mul[x, gen]
    assert x == 1
    return exp, dlog


class FieldContext:
    """Tables for F_q; `ext` holds the F_{q^2} data."""

    def __init__(self, q: int):
        p, e = factor_prime_power(q)
        self.q = q
        self.p = p
        self.e = e
        self.modulus = None if e == 1 else _smallest_irreducible(p, e)
        digits = [[(x // p ** i) % p for i in range(e)] for x in range(q)]
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for x in range(q):
            for y in range(q):
                s = [(a + b) % p for a, b in zip(digits[x], digits[y])]
                add[x, y] = sum(c * p ** i for i, c in enumerate(s))
                if e == 1:
                    mul[x, y] = (x * y) % p
                else:
                    m = _fp_poly_mulmod(digits[x], digits[y],
                                        self.modulus, p)
                    mul[x, y] = sum(c * p ** i for i, c in enumerate(m))
        self.add = add
        self.mul = mul
        self.neg = np.array(
            [sum(((-d) % p) * p ** i for i, d in enumerate(digits[x]))
             for x in range(q)], dtype=np.int64)
        # trace to F_p: sum of p-power Frobenius images
        trace = np.zeros(q, dtype=np.int64)
        for x in range(q):
            acc = 0
            y = x
            for _ in range(e):
                acc = add[acc, y]
                y = _pow_table(mul, y, p)
            trace[x] = acc
            assert trace[x] < p, "trace landed outside F_p"
        self.trace = trace
        self.ext = ExtContext(self)
        # F_q generator compatible with the extension generator
        g = 1
        for _ in range(q + 1):
            g = self.ext.mul2[g, self.ext.gen2]
        assert g < q, "gen2^(q+1) must land in F_q"
        self.gen = int(g)
        self.exp, self.dlog = _power_tables(self.mul, self.gen, q)
        self.inv = np.zeros(q, dtype=np.int64)
        nz = np.arange(1, q)
        self.inv[nz] = self.exp[(-self.dlog[nz]) % (q - 1)]

    def __repr__(self) -> str:
        return f"FieldContext(q={self.q})"


def _pow_table(mul, x, k):
    out = 1
    for _ in range(k):
        out = mul[out, x]
    return out


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldContext:
    return FieldContext(q)


# ---------------------------------------------------------------------------
# monic polynomials over F_q (packed coefficient tuples, ascending degree)
# ---------------------------------------------------------------------------

def all_monics(q: int, d: int):
    """All monic degree-d coefficient tuples (c0, ..., c_{d-1}, 1)."""
    for tail in product(range(q), repeat=d):
        yield tail + (1,)


def poly_mul(ctx: FieldContext, f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = int(ctx.add[out[i + j], ctx.mul[a, b]])
    return tuple(out)


def poly_divmod(ctx: FieldContext, f, g):
    """f = quo*g + rem with g monic."""
    assert g[-1] == 1
    rem = list(f)
    dg = len(g) - 1
    quo = [0] * max(len(f) - dg, 0)
    for i in range(len(rem) - 1, dg - 1, -1):
        c = rem[i]
        if c:
            quo[i - dg] = c
            for j in range(dg + 1):
                rem[i - dg + j] = int(
                    ctx.add[rem[i - dg + j],
                            ctx.neg[ctx.mul[c, g[j]]]])
    while len(rem) > 1 and rem[-1] == 0:
        rem.pop()
    return tuple(quo), tuple(rem)


def poly_eval(ctx: FieldContext, f, x: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = int(ctx.add[ctx.mul[acc, x], c])
    return acc


@lru_cache(maxsize=None)
def irreducible_monics(q: int, d: int) -> tuple[tuple[int, ...], ...]:
    """All irreducible monics of degree d over F_q, sorted by tuple."""
    assert 1 <= d <= NMAX
    ctx = make_field(q)
    out = []
    for f in all_monics(q, d):
        if _is_irreducible(ctx, f):
            out.append(f)
    return tuple(sorted(out))


def _is_irreducible(ctx: FieldContext, f) -> bool:
    d = len(f) - 1
    if d == 1:
        return True
    for dd in range(1, d // 2 + 1):
        for g in irreducible_monics(ctx.q, dd):
            _, rem = poly_divmod(ctx, f, g)
            if rem == (0,):
                return False
    return True


@lru_cache(maxsize=None)
def factor_monic(q: int, f: tuple[int, ...]) -> tuple:
    """Factorization of a monic poly into sorted (irreducible, multiplicity).

    Little-endian coefficient tuples; f must be monic of degree >= 1.
    """
    ctx = make_field(q)
    d = len(f) - 1
    assert d >= 1 and f[-1] == 1
    factors = []
    rest = f
    for dd in range(1, d + 1):
        if len(rest) - 1 < dd:
            break
        for g in irreducible_monics(q, dd):
            mult = 0
            while len(rest) > dd:
                quo, rem = poly_divmod(ctx, rest, g)
                if rem == (0,):
                    mult += 1
                    rest = quo
                else:
                    break
            if mult:
                factors.append((g, mult))
    assert rest == (1,), "factorization incomplete"
    return tuple(sorted(factors, key=lambda fm: (len(fm[0]), fm[0])))
