"""Exact character theory for GL_n(F_q).

Characters are stored as class functions: one exact cyclotomic value per
conjugacy class.  Building blocks:

  * GL_1 characters  alpha_a(x) = zeta_{q-1}^{a dlog x};
  * irreducible cuspidal characters of GL_2 attached to regular
    characters theta of F_{q^2}^x  (values (q-1)theta(z) / -theta(z) /
    0 / -(theta(x)+theta(x^q)) on central / non-semisimple / split /
    elliptic classes);
  * parabolically induced characters, computed by summing over g-stable
    subspaces and recursing on the quotient action (memoized by the
    conjugacy class of the quotient);
  * generalized Speh constituents Speh(sigma, 2) for a GL_2 cuspidal
    sigma, extracted from the reducible induced character sigma x sigma
    by the trace of the standard intertwining operator:
        chi_M(g) = sum over V with gV + V = F^{4} (direct)
                   of chi_sigma(A*_V),
    where A*_V is the matrix of proj_V o g^2|_V along gV.  On the two
    irreducible constituents M acts by scalars (-bQ, b) with Q = q^2,
    so chi_Speh = (chi_Ind - chi_M/b) / (Q+1) once b is read off from
    <chi_M, chi_Ind> = b(1-Q).  All the normalization facts used are
    asserted at construction time.

Every constructed irreducible is verified to have <chi, chi> = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cyclo import CycloContext, ScaledCyclotomic, make_context
from .ffield import make_field
from .glclasses import (CHAIN_BUDGET, BudgetError, GroupContext,
                        flag_chain_count, get_group, identity, mat_det,
                        mat_inv, mat_mul, mat_rank)


class UnsupportedRepError(ValueError):
    """A representation datum outside the implemented range."""


@lru_cache(maxsize=None)
def get_ring(q: int) -> CycloContext:
    return make_context(q)


# ---------------------------------------------------------------------------
# class functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClassFunction:
    ctx: GroupContext
    ring: CycloContext
    values: tuple[ScaledCyclotomic, ...]

    def evaluate(self, g: np.ndarray) -> ScaledCyclotomic:
        return self.values[self.ctx.class_index(g)]

    def dim(self) -> int:
        val = self.values[self.ctx.class_index(identity(self.ctx.n))]
        r = val.as_rational()
        assert r.denominator == 1
        return int(r)

    def conj(self) -> ClassFunction:
        return ClassFunction(self.ctx, self.ring,
                             tuple(v.conj() for v in self.values))

    def scale(self, c) -> ClassFunction:
        return ClassFunction(self.ctx, self.ring,
                             tuple(v.scale(c) for v in self.values))

    def __add__(self, other: ClassFunction) -> ClassFunction:
        assert self.ctx is other.ctx
        return ClassFunction(self.ctx, self.ring,
                             tuple(a + b for a, b in
                                   zip(self.values, other.values)))

    def __sub__(self, other: ClassFunction) -> ClassFunction:
        assert self.ctx is other.ctx
        return ClassFunction(self.ctx, self.ring,
                             tuple(a - b for a, b in
                                   zip(self.values, other.values)))

    def __mul__(self, other: ClassFunction) -> ClassFunction:
        assert self.ctx is other.ctx
        return ClassFunction(self.ctx, self.ring,
                             tuple(a * b for a, b in
                                   zip(self.values, other.values)))

    def twist_by_det(self, a: int) -> ClassFunction:
        return self * dettwist_char(self.ring, self.ctx.q, self.ctx.n, a)

def inner_product(f: ClassFunction, h: ClassFunction) -> ScaledCyclotomic:
    """(1/|G|) sum over G of f(g) conj(h(g)), exactly."""
    assert f.ctx is h.ctx
    total = f.ring.zero
    for info, a, b in zip(f.ctx.classes, f.values, h.values):
        total = total + (a * b.conj()).scale(info.size)
    return total.scale(Fraction(1, f.ctx.order))

def inner_product_int(f: ClassFunction, h: ClassFunction) -> int:
    r = inner_product(f, h).as_rational()
    assert r.denominator == 1
    return int(r)


# ---------------------------------------------------------------------------
# basic characters
# ---------------------------------------------------------------------------

def gl1_char(ring: CycloContext, q: int, a: int) -> ClassFunction:
    """alpha_a on GL_1(F_q): x -> zeta_{q-1}^{a dlog x}."""
    ctx = get_group(q, 1)
    F = ctx.F
    vals = []
    for info in ctx.classes:
        x = int(info.rep[0, 0])
        vals.append(ring.root_of_unity(q - 1, a * F.dlog[x]))
    return ClassFunction(ctx, ring, tuple(vals))

def dettwist_char(ring: CycloContext, q: int, n: int, a: int) -> ClassFunction:
    """The one-dimensional character alpha_a(det) of GL_n(F_q)."""
    ctx = get_group(q, n)
    F = ctx.F
    vals = []
    for info in ctx.classes:
        d = mat_det(F, info.rep)
        vals.append(ring.root_of_unity(q - 1, a * F.dlog[d]))
    return ClassFunction(ctx, ring, tuple(vals))

def is_regular_mod(q: int, t: int) -> bool:
    return (t * q - t) % (q * q - 1) != 0

@lru_cache(maxsize=None)
def cuspidal2_char(q: int, t: int) -> ClassFunction:
    """Irreducible cuspidal character of GL_2(F_q) for a regular t."""
    if not is_regular_mod(q, t):
        raise ValueError(f"t={t} is not regular mod {q * q - 1}")
    ring = get_ring(q)
    ctx = get_group(q, 2)
    F = ctx.F
    ext = F.ext
    Q1 = q * q - 1

    def theta_base(z: int) -> ScaledCyclotomic:
        return ring.root_of_unity(Q1, t * (q + 1) * F.dlog[z])

    vals = []
    for info in ctx.classes:
        label = info.label
        if len(label) == 2:
            vals.append(ring.zero)
            continue
        f, lam = label[0]
        if len(f) == 2:  # eigenvalue z in F_q
            z = F.neg[f[0]]
            if lam == (1, 1):
                vals.append(theta_base(z).scale(q - 1))
            else:
                vals.append(theta_base(z).scale(-1))
        else:  # irreducible quadratic: elliptic class
            root = None
            for x in range(1, q * q):
                acc = 0
                for c in reversed(f):
                    acc = ext.mul2[acc, x]
                    acc = ext.add2[acc, c]
                if acc == 0:
                    root = x
                    break
            assert root is not None
            j = int(ext.dlog2[root])
            val = ring.root_of_unity(Q1, t * j) + \
                ring.root_of_unity(Q1, t * j * q)
            vals.append(val.scale(-1))
    cf = ClassFunction(ctx, ring, tuple(vals))
    assert inner_product_int(cf, cf) == 1
    assert cf.dim() == q - 1
    return cf


# ---------------------------------------------------------------------------
# parabolic induction
# ---------------------------------------------------------------------------

def induced_char(ring: CycloContext, q: int, composition: tuple[int, ...],
                 chars: list[ClassFunction]) -> ClassFunction:
    """Character parabolically induced from chars on the block Levi.

    Computed per class as a sum over g-stable subspaces of the first
    block dimension, recursing on the quotient action; the recursion is
    memoized on the conjugacy class of the quotient.
    """
    n = sum(composition)
    assert len(chars) == len(composition)
    for d, cf in zip(composition, chars):
        assert cf.ctx.n == d and cf.ctx.q == q
    nchains = flag_chain_count(n, composition, q)
    if nchains > CHAIN_BUDGET:
        raise BudgetError(
            f"induction of shape {composition} over F_{q} sums over "
            f"{nchains} flags (cap {CHAIN_BUDGET})")
    ctx = get_group(q, n)
    F = ctx.F
    memo: dict[tuple[int, int], ScaledCyclotomic] = {}

    def rec(nn: int, g: np.ndarray, comps: tuple[int, ...],
            cfs: list[ClassFunction]) -> ScaledCyclotomic:
        sub = get_group(q, nn)
        if len(comps) == 1:
            return cfs[0].values[sub.class_index(g)]
        key = (len(comps), sub.class_index(g))
        hit = memo.get(key)
        if hit is not None:
            return hit
        d = comps[0]
        ctx_d = get_group(q, d)
        ctx_rest = get_group(q, nn - d)
        total = ring.zero
        for piv, T in sub.subspace_groups(d):
            piv = list(piv)
            rest_rows = [r for r in range(nn) if r not in piv]
            if F.e == 1:
                gT = np.matmul(g.astype(np.int64), T) % q
                C = gT[:, piv, :]
                stable = np.all((np.matmul(T, C) % q) == gT, axis=(1, 2))
                sel = np.nonzero(stable)[0]
                if len(sel) == 0:
                    continue
                Cs = C[sel]
                corr = np.matmul(T[sel][:, rest_rows, :],
                                 g[np.ix_(piv, rest_rows)]) % q
                Qs = (g[np.ix_(rest_rows, rest_rows)][None] - corr) % q
                ci = ctx_d.batch_class_indices(Cs)
                qi = ctx_rest.batch_class_indices(Qs)
            else:
                ci_list, qi_list = [], []
                for i in range(T.shape[0]):
                    Ti = T[i]
                    gT = mat_mul(F, g, Ti)
                    Ci = gT[piv, :]
                    if not np.array_equal(mat_mul(F, Ti, Ci), gT):
                        continue
                    corr = mat_mul(F, Ti[rest_rows, :],
                                   g[np.ix_(piv, rest_rows)])
                    Qi = F.add[g[np.ix_(rest_rows, rest_rows)],
                               F.neg[corr]]
                    ci_list.append(ctx_d.class_index(Ci))
                    qi_list.append(ctx_rest.class_index(Qi))
                if not ci_list:
                    continue
                ci = np.array(ci_list)
                qi = np.array(qi_list)
            pairs, counts = np.unique(np.stack([ci, qi], axis=1),
                                      axis=0, return_counts=True)
            for (a, b), cnt in zip(pairs, counts):
                tail = rec(nn - d, ctx_rest.classes[b].rep,
                           comps[1:], cfs[1:])
                total = total + (cfs[0].values[a] * tail).scale(int(cnt))
        memo[key] = total
        return total

    values = tuple(rec(n, info.rep, tuple(composition), chars)
                   for info in ctx.classes)
    return ClassFunction(ctx, ring, values)


# ---------------------------------------------------------------------------
# generalized Speh constituents
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def speh2_of_cusp2(q: int, t: int) -> ClassFunction:
    """Speh(sigma, 2) on GL_4 for the GL_2 cuspidal sigma attached to t."""
    ring = get_ring(q)
    sigma = cuspidal2_char(q, t)
    chi_ind = induced_char(ring, q, (2, 2), [sigma, sigma])
    assert inner_product_int(chi_ind, chi_ind) == 2
    ctx = get_group(q, 4)
    F = ctx.F
    Q = q * q

    # trace of the standard intertwining operator against g
    m_vals = []
    groups = ctx.subspace_groups(2)
    for info in ctx.classes:
        g = info.rep
        total = ring.zero
        for piv, T in groups:
            for i in range(T.shape[0]):
                Ti = T[i]
                gT = mat_mul(F, g, Ti)
                Y = np.concatenate([Ti, gT], axis=1)
                if mat_rank(F, Y) != 4:
                    continue
                g2T = mat_mul(F, g, gT)
                Astar = mat_mul(F, mat_inv(F, Y), g2T)[:2, :]
                total = total + sigma.evaluate(Astar)
        m_vals.append(total)
    chi_m = ClassFunction(ctx, ring, tuple(m_vals))

    pairing = inner_product(chi_m, chi_ind).as_rational()
    b = pairing / (1 - Q)
    assert b in (q, -q), f"unexpected intertwiner scale {b}"
    speh = (chi_ind - chi_m.scale(Fraction(1, int(b)))).scale(
        Fraction(1, Q + 1))
    assert inner_product_int(speh, speh) == 1
    assert speh.dim() * (Q + 1) == chi_ind.dim()
    return speh


# ---------------------------------------------------------------------------
# representation specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GL1Datum:
    a: int

@dataclass(frozen=True)
class Cusp2Datum:
    t: int

Datum = GL1Datum | Cusp2Datum

@dataclass(frozen=True)
class PrincipalSeriesRegular:
    exponents: tuple[int, ...]

@dataclass(frozen=True)
class DetTwist:
    n: int
    a: int

@dataclass(frozen=True)
class SteinbergTwist:
    a: int

@dataclass(frozen=True)
class Cuspidal2:
    t: int

@dataclass(frozen=True)
class InducedCuspidals:
    data: tuple[Datum, ...]

RepSpec = (PrincipalSeriesRegular | DetTwist | SteinbergTwist
           | Cuspidal2 | InducedCuspidals)

def datum_degree(d: Datum) -> int:
    return 1 if isinstance(d, GL1Datum) else 2

def spec_degree(spec: RepSpec) -> int:
    if isinstance(spec, PrincipalSeriesRegular):
        return len(spec.exponents)
    if isinstance(spec, DetTwist):
        return spec.n
    if isinstance(spec, (SteinbergTwist, Cuspidal2)):
        return 2
    return sum(datum_degree(d) for d in spec.data)

def _canonical_datum(q: int, d: Datum):
    if isinstance(d, GL1Datum):
        return (1, d.a % (q - 1)) if q > 2 else (1, 0)
    tt = d.t % (q * q - 1)
    return (2, min(tt, (tt * q) % (q * q - 1)))

def cuspidal_support(q: int, spec: RepSpec) -> tuple:
    """Sorted multiset of canonical cuspidal data."""
    if isinstance(spec, PrincipalSeriesRegular):
        items = [_canonical_datum(q, GL1Datum(a)) for a in spec.exponents]
    elif isinstance(spec, DetTwist):
        items = [_canonical_datum(q, GL1Datum(spec.a))] * spec.n
    elif isinstance(spec, SteinbergTwist):
        items = [_canonical_datum(q, GL1Datum(spec.a))] * 2
    elif isinstance(spec, Cuspidal2):
        items = [_canonical_datum(q, Cusp2Datum(spec.t))]
    else:
        items = [_canonical_datum(q, d) for d in spec.data]
    return tuple(sorted(items))

def supports_disjoint(q: int, s1: RepSpec, s2: RepSpec) -> bool:
    a = set(cuspidal_support(q, s1))
    b = set(cuspidal_support(q, s2))
    return not (a & b)

def dual_spec(spec: RepSpec) -> RepSpec:
    if isinstance(spec, PrincipalSeriesRegular):
        return PrincipalSeriesRegular(tuple(-a for a in spec.exponents))
    if isinstance(spec, DetTwist):
        return DetTwist(spec.n, -spec.a)
    if isinstance(spec, SteinbergTwist):
        return SteinbergTwist(-spec.a)
    if isinstance(spec, Cuspidal2):
        return Cuspidal2(-spec.t)
    return InducedCuspidals(tuple(dual_datum(d) for d in spec.data))

def dual_datum(d: Datum) -> Datum:
    if isinstance(d, GL1Datum):
        return GL1Datum(-d.a)
    return Cusp2Datum(-d.t)

def datum_spec(d: Datum) -> RepSpec:
    """The cuspidal irreducible named by a single datum, as a spec."""
    if isinstance(d, GL1Datum):
        return DetTwist(1, d.a)
    return Cuspidal2(d.t)

def induced_spec(data: tuple[Datum, ...]) -> RepSpec:
    """Spec of the irreducible induced from pairwise distinct data."""
    if len(data) == 1:
        return datum_spec(data[0])
    if all(isinstance(d, GL1Datum) for d in data):
        return PrincipalSeriesRegular(tuple(d.a for d in data))
    return InducedCuspidals(tuple(data))

def central_exponent(q: int, spec: RepSpec) -> int:
    """Exponent a with omega(z) = zeta_{q-1}^{a dlog z} on the center."""
    if isinstance(spec, PrincipalSeriesRegular):
        return sum(spec.exponents) % (q - 1) if q > 2 else 0
    if isinstance(spec, DetTwist):
        return (spec.n * spec.a) % (q - 1) if q > 2 else 0
    if isinstance(spec, SteinbergTwist):
        return (2 * spec.a) % (q - 1) if q > 2 else 0
    if isinstance(spec, Cuspidal2):
        return spec.t % (q - 1) if q > 2 else 0
    total = 0
    for d in spec.data:
        total += d.a if isinstance(d, GL1Datum) else d.t
    return total % (q - 1) if q > 2 else 0

def omega_minus_one(ring: CycloContext, q: int, spec: RepSpec) \
        -> ScaledCyclotomic:
    """Central character at -1 (always +-1)."""
    if q % 2 == 0:
        return ring.one
    return ring.root_of_unity(
        q - 1, central_exponent(q, spec) * ((q - 1) // 2))

def _check_distinct_data(q: int, data: tuple[Datum, ...]) -> None:
    canon = [_canonical_datum(q, d) for d in data]
    if len(set(canon)) != len(canon):
        raise ValueError("cuspidal data are not pairwise inequivalent")
    for d in data:
        if isinstance(d, Cusp2Datum) and not is_regular_mod(q, d.t):
            raise ValueError(f"t={d.t} is not regular mod {q * q - 1}")

def char_of_datum(ring: CycloContext, q: int, d: Datum) -> ClassFunction:
    if isinstance(d, GL1Datum):
        return gl1_char(ring, q, d.a)
    return cuspidal2_char(q, d.t)

@lru_cache(maxsize=None)
def char_of_repspec(q: int, spec: RepSpec) -> ClassFunction:
    """Exact character of the irreducible named by spec; checks
    <chi, chi> = 1 at construction."""
    ring = get_ring(q)
    if isinstance(spec, PrincipalSeriesRegular):
        exps = spec.exponents
        _check_distinct_data(q, tuple(GL1Datum(a) for a in exps))
        chars = [gl1_char(ring, q, a) for a in exps]
        cf = induced_char(ring, q, (1,) * len(exps), chars)
    elif isinstance(spec, DetTwist):
        cf = dettwist_char(ring, q, spec.n, spec.a)
    elif isinstance(spec, SteinbergTwist):
        full = induced_char(ring, q, (1, 1),
                            [gl1_char(ring, q, spec.a)] * 2)
        cf = full - dettwist_char(ring, q, 2, spec.a)
    elif isinstance(spec, Cuspidal2):
        cf = cuspidal2_char(q, spec.t)
    else:
        _check_distinct_data(q, spec.data)
        comp = tuple(datum_degree(d) for d in spec.data)
        chars = [char_of_datum(ring, q, d) for d in spec.data]
        cf = induced_char(ring, q, comp, chars)
    assert inner_product_int(cf, cf) == 1, "spec is not irreducible"
    return cf


# ---------------------------------------------------------------------------
# Speh blocks for generic data
# ---------------------------------------------------------------------------

def speh_block_char(q: int, d: Datum, c: int) -> ClassFunction:
    """Character of Speh(sigma_d, c) on GL_{deg(d) * c}(F_q)."""
    ring = get_ring(q)
    if isinstance(d, GL1Datum):
        return dettwist_char(ring, q, c, d.a)
    if c == 1:
        return cuspidal2_char(q, d.t)
    if c == 2:
        return speh2_of_cusp2(q, d.t)
    raise UnsupportedRepError(
        "Speh blocks of GL_2 cuspidal data need c <= 2 here "
        f"(got c={c})")


# ---------------------------------------------------------------------------
# CLI spec grammar
# ---------------------------------------------------------------------------

def parse_datum(text: str) -> Datum:
    kind, _, arg = text.partition(":")
    arg = arg.removeprefix("t=").removeprefix("a=")
    if kind == "gl1":
        return GL1Datum(int(arg))
    if kind == "cusp2":
        return Cusp2Datum(int(arg))
    raise ValueError(f"unknown cuspidal datum {text!r}")

def parse_rep_spec(text: str, n: int | None = None) -> RepSpec:
    """Parse 'ps:0,1' / 'det:a' / 'st:a' / 'cusp2:t=1' /
    'ind:cusp2:1+gl1:0' into a RepSpec."""
    kind, _, arg = text.partition(":")
    if kind == "ps":
        return PrincipalSeriesRegular(
            tuple(int(x) for x in arg.split(",")))
    if kind == "det":
        if n is None:
            raise ValueError("det twist needs the group size n")
        return DetTwist(n, int(arg.removeprefix("a=")))
    if kind == "st":
        return SteinbergTwist(int(arg.removeprefix("a=")))
    if kind == "cusp2":
        return Cuspidal2(int(arg.removeprefix("t=")))
    if kind == "ind":
        return InducedCuspidals(
            tuple(parse_datum(p) for p in arg.split("+")))
    raise ValueError(f"unknown representation spec {text!r}")

def parse_cuspidal_data(text: str) -> tuple[Datum, ...]:
    """Parse 'gl1:0+cusp2:1' into an ordered tuple of cuspidal data."""
    return tuple(parse_datum(p) for p in text.split("+"))
