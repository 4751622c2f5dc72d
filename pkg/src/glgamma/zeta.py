"""Zeta operators on GL_c(F_q) as exact trace profiles.

A test function f on M_c(F_q) and an irreducible character chi of
GL_c(F_q) define the zeta operator Z(f, pi) = sum_g f(g) pi(g).  We
never build pi's matrices: every operator identity asserted here is an
identity of traces tr(Z . pi(x)) over literal group elements x, which
suffices because the translates pi(x) span the full matrix algebra.

Three families of identities are checked exactly in Q(zeta_m)[sqrt(q)]:

* the Godement-Jacquet functional equation relating Z(f, pi x chi_a)
  to Z of the transposed Fourier transform against the contragredient,
  with the Macdonald gamma factor as the constant;
* the functional equations of the Bessel-Speh zeta operators Z_j and
  Z*_j built from a Whittaker function W(g) = BS(g h), with the
  Bessel-Speh-kernel gamma factor as the constant, together with the
  function-variant equation, a transpose-dual identity, and the
  contragredient/double-equation consequences;
* a converse-theorem separation scan and the rank-two corner-value
  expansion of BS on GL_4 in terms of GL_2 Bessel values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .characters import (ClassFunction, Cusp2Datum, Cuspidal2, Datum,
                         DetTwist, GL1Datum, InducedCuspidals,
                         PrincipalSeriesRegular, RepSpec, SteinbergTwist,
                         UnsupportedRepError, central_exponent,
                         char_of_repspec, dual_datum, dual_spec, get_ring,
                         induced_spec, spec_degree, supports_disjoint)
from .cyclo import ScaledCyclotomic
from .gammafactors import gamma_gj_twisted, gamma_gk, generic_data
from .glclasses import (BudgetError, get_group, identity, mat_det, mat_inv,
                        mat_mul, transpose_inverse)
from .kloosterman import flat_group
from .whittaker import (antidiagonal_embed, bessel_J, bessel_speh_value,
                        bessel_speh_values, psi_value, tau_degree)

#: cap on (stack size) x (radical size) products in one zeta sweep
ZETA_BUDGET = 1_000_000_000

_DEFAULT_SEED = 20260817


# ---------------------------------------------------------------------------
# functions on c x c matrices
# ---------------------------------------------------------------------------

def mat_code(q: int, mat: np.ndarray) -> int:
    """Base-q code of a matrix, row-major with entry (0,0) least significant."""
    flat = np.asarray(mat, dtype=np.int64).reshape(-1)
    return int(flat @ (q ** np.arange(flat.size, dtype=np.int64)))


@lru_cache(maxsize=None)
def _all_mats_cached(q: int, rows: int, cols: int) -> np.ndarray:
    cells = rows * cols
    codes = np.arange(q ** cells, dtype=np.int64)
    digits = (codes[:, None] // (q ** np.arange(cells, dtype=np.int64))) % q
    mats = digits.reshape(q ** cells, rows, cols)
    mats.setflags(write=False)
    return mats


def all_mats(q: int, rows: int, cols: int) -> np.ndarray:
    """Every rows x cols matrix over F_q, indexed by base-q code."""
    return _all_mats_cached(q, rows, cols)


@dataclass(frozen=True, eq=False)
class MatFunction:
    """Exact function on M_c(F_q), stored in base-q code order."""

    q: int
    c: int
    values: tuple[ScaledCyclotomic, ...]

    def __post_init__(self) -> None:
        assert len(self.values) == self.q ** (self.c * self.c)

    def value_at(self, mat: np.ndarray) -> ScaledCyclotomic:
        return self.values[mat_code(self.q, mat)]

    def transpose(self) -> MatFunction:
        """The function X -> f(tX)."""
        perm = _transpose_codes(self.q, self.c)
        return MatFunction(self.q, self.c,
                           tuple(self.values[j] for j in perm))

    def support(self) -> list[int]:
        return [i for i, v in enumerate(self.values) if not v.is_zero()]


@lru_cache(maxsize=None)
def _transpose_codes(q: int, c: int) -> tuple[int, ...]:
    mats = all_mats(q, c, c)
    return tuple(mat_code(q, mats[i].T) for i in range(mats.shape[0]))


def delta_function(q: int, c: int, mat: np.ndarray) -> MatFunction:
    """The indicator of a single matrix."""
    ring = get_ring(q)
    vals = [ring.zero] * (q ** (c * c))
    vals[mat_code(q, mat)] = ring.one
    return MatFunction(q, c, tuple(vals))


def constant_function(q: int, c: int,
                      value: ScaledCyclotomic) -> MatFunction:
    """The constant function with the given value."""
    return MatFunction(q, c, (value,) * (q ** (c * c)))


# ---------------------------------------------------------------------------
# Fourier transform on M_c(F_q)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _pair_trace_table(q: int, c: int) -> np.ndarray:
    """T[i, j] = tr(M_i M_j) over all c x c matrices in code order."""
    n = q ** (c * c)
    if n * n > ZETA_BUDGET:
        raise BudgetError(
            f"pair-trace table needs {n}^2 = {n * n} cells (q={q}, c={c}), "
            f"over ZETA_BUDGET={ZETA_BUDGET}")
    F = get_group(q, 1).F
    mats = all_mats(q, c, c)
    flat = mats.reshape(n, c * c)
    # tr(XY) = sum_{i,j} X[i,j] Y[j,i]: pair the row-major flattening of X
    # with the transposed flattening of Y
    tflat = np.ascontiguousarray(mats.transpose(0, 2, 1)).reshape(n, c * c)
    if F.e == 1:
        table = np.remainder(flat @ tflat.T, F.p).astype(np.int64)
    else:
        table = np.zeros((n, n), dtype=np.int64)
        for pos in range(c * c):
            table = F.add[table, F.mul[flat[:, pos][:, None],
                                       tflat[:, pos][None, :]]]
    table.setflags(write=False)
    return table


def fourier_transform(f: MatFunction, t: int = 1) -> MatFunction:
    """F_psi f(X) = q^{-c^2/2} sum_Y f(Y) psi_t(tr XY)."""
    q, c = f.q, f.c
    ring = get_ring(q)
    F = get_group(q, 1).F
    table = _pair_trace_table(q, c)
    psi_vals = [psi_value(ring, F, s, t) for s in range(q)]
    sup = f.support()
    half = ring.q_half_power(-c * c)
    out = []
    for x in range(len(f.values)):
        row = table[x]
        buckets = [ring.zero] * q
        for j in sup:
            s = int(row[j])
            buckets[s] = buckets[s] + f.values[j]
        total = ring.zero
        for s in range(q):
            if not buckets[s].is_zero():
                total = total + psi_vals[s] * buckets[s]
        out.append(total * half)
    return MatFunction(q, c, tuple(out))


# ---------------------------------------------------------------------------
# trace profiles of zeta operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TraceProfile:
    """tr(Z . pi(x)) at the class representatives of GL_c(F_q)."""

    q: int
    c: int
    values: tuple[ScaledCyclotomic, ...]


def _seeded_invertible(q: int, n: int, count: int,
                       seed: int) -> list[np.ndarray]:
    F = get_group(q, 1).F
    rng = np.random.default_rng(seed)
    out: list[np.ndarray] = []
    while len(out) < count:
        m = rng.integers(0, q, size=(n, n)).astype(np.int64)
        if mat_det(F, m) != 0:
            out.append(m)
    return out


def _classes_of_products(fg, left: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Class index of (A x) for each A in the stack `left`."""
    ctx = fg.ctx
    F = ctx.F
    if F.e == 1:
        prods = np.remainder(left.astype(np.int64) @ x.astype(np.int64), F.p)
        return ctx.batch_class_indices(prods)
    out = np.empty(left.shape[0], dtype=np.int64)
    for i in range(left.shape[0]):
        out[i] = ctx.class_index(mat_mul(F, left[i], x))
    return out


def _pair_profile(q: int, c: int, coeffs: list[ScaledCyclotomic],
                  chi: ClassFunction, xs: list[np.ndarray], *,
                  contragredient: bool = False) -> list[ScaledCyclotomic]:
    """sum_g coeffs[g] chi(class(act(g) x)) at each literal x.

    act(g) is g itself, or its transpose inverse when `contragredient`
    (the standard matrix model of the dual on the same space).
    """
    fg = flat_group(q, c)
    ring = chi.ring
    if contragredient:
        left = np.ascontiguousarray(
            fg.mats[fg.inv_idx].transpose(0, 2, 1))
    else:
        left = fg.mats
    nz = [i for i, v in enumerate(coeffs) if not v.is_zero()]
    out = []
    for x in xs:
        cls = _classes_of_products(fg, left, np.asarray(x, dtype=np.int64))
        buckets: dict[int, ScaledCyclotomic] = {}
        for i in nz:
            ci = int(cls[i])
            prev = buckets.get(ci)
            buckets[ci] = coeffs[i] if prev is None else prev + coeffs[i]
        total = ring.zero
        for ci in sorted(buckets):
            total = total + buckets[ci] * chi.values[ci]
        out.append(total)
    return out


def _gj_coefficients(q: int, c: int, f: MatFunction,
                     a: int) -> list[ScaledCyclotomic]:
    """f(g) chi_a(det g) at each flat-group index."""
    fg = flat_group(q, c)
    ring = get_ring(q)
    codes = fg.codes(fg.mats)
    out = []
    for i in range(fg.size):
        v = f.values[int(codes[i])]
        if v.is_zero() or a % (q - 1) == 0:
            out.append(v)
        else:
            out.append(v * ring.root_of_unity(q - 1,
                                              a * int(fg.det_dlog[i])))
    return out


def gj_zeta_profile(q: int, f: MatFunction, pi: RepSpec, a: int = 0,
                    contragredient: bool = False) -> TraceProfile:
    """Trace profile of Z(f, pi x chi_a) = sum_g f(g) chi_a(det g) pi(g)."""
    c = f.c
    assert spec_degree(pi) == c, "function degree must match pi"
    chi = char_of_repspec(q, pi)
    coeffs = _gj_coefficients(q, c, f, a)
    xs = [info.rep for info in get_group(q, c).classes]
    vals = _pair_profile(q, c, coeffs, chi, xs,
                         contragredient=contragredient)
    return TraceProfile(q, c, tuple(vals))


# ---------------------------------------------------------------------------
# Godement-Jacquet functional equation (Macdonald's gamma factor)
# ---------------------------------------------------------------------------

def _delta_fe_cases(q: int, c: int, chi: ClassFunction, a: int,
                    gamma: ScaledCyclotomic, t: int,
                    xs: list[np.ndarray],
                    prefix: str = "") -> list[dict]:
    """Functional-equation cases over the full delta basis of M_c(F_q).

    For each matrix Z: pairing the transposed Fourier transform of
    delta_Z against the dual twisted by chi_{-a} must equal gamma times
    the pairing of delta_Z twisted by chi_a, trace against every x.
    Singular Z makes the right side the zero operator, so the left side
    must vanish identically.
    """
    mats = all_mats(q, c, c)
    ainv = (-a) % (q - 1)
    cases = []
    for code in range(mats.shape[0]):
        fz = delta_function(q, c, mats[code])
        lhs_f = fourier_transform(fz, t).transpose()
        lhs_vals = _pair_profile(q, c, _gj_coefficients(q, c, lhs_f, ainv),
                                 chi, xs, contragredient=True)
        rhs_vals = _pair_profile(q, c, _gj_coefficients(q, c, fz, a),
                                 chi, xs)
        bad = None
        for i, (lv, rv) in enumerate(zip(lhs_vals, rhs_vals)):
            if not (lv - gamma * rv).is_zero():
                bad = (i, lv, gamma * rv)
                break
        if bad is None:
            cases.append({"name": f"{prefix}delta={code}", "status": "pass"})
        else:
            i, lv, rv = bad
            cases.append({"name": f"{prefix}delta={code}", "status": "fail",
                          "witness": f"x#{i}", "lhs": lv.serialize(),
                          "rhs": rv.serialize()})
    return cases


def check_macdonald_fe(q: int, pi: RepSpec, a: int = 0, t: int = 1,
                       extra: int = 4, seed: int = _DEFAULT_SEED) -> dict:
    """Godement-Jacquet functional equation for pi twisted by chi_a.

    Runs over the full delta basis of M_c(F_q), trace against every
    class representative plus seeded invertible matrices.  Gated on the
    inverse twist staying outside the cuspidal support of pi.
    """
    c = spec_degree(pi)
    params = {"q": q, "pi": repr(pi), "a": a, "t": t,
              "extra": extra, "seed": seed}
    suite = "gj-fe"
    if not supports_disjoint(q, pi, DetTwist(1, (-a) % (q - 1))):
        return {"suite": suite, "params": params, "ok": True,
                "cases": [{"name": "gate", "status": "skipped",
                           "reason": "inverse twist lies in the cuspidal "
                                     "support; equation not applicable"}]}
    chi = char_of_repspec(q, pi)
    gamma = gamma_gj_twisted(q, pi, a, t).value
    xs = [info.rep for info in get_group(q, c).classes]
    xs += _seeded_invertible(q, c, extra, seed)
    cases = _delta_fe_cases(q, c, chi, a, gamma, t, xs)
    ok = all(case["status"] == "pass" for case in cases)
    return {"suite": suite, "params": params, "ok": ok, "cases": cases}


def check_dual_routes(q: int, pi: RepSpec) -> dict:
    """chi(tg^{-1}) = conj chi(g) = chi of the dual spec, on every class."""
    c = spec_degree(pi)
    ctx = get_group(q, c)
    chi = char_of_repspec(q, pi)
    chi_dual = char_of_repspec(q, dual_spec(pi))
    conj = chi.conj()
    cases = []
    for idx, info in enumerate(ctx.classes):
        tg = transpose_inverse(ctx.F, info.rep)
        v1 = chi.values[ctx.class_index(tg)]
        v2 = conj.values[idx]
        v3 = chi_dual.values[idx]
        good = (v1 - v2).is_zero() and (v2 - v3).is_zero()
        cases.append({"name": f"class={info.label}",
                      "status": "pass" if good else "fail"})
    ok = all(case["status"] == "pass" for case in cases)
    return {"suite": "infra", "params": {"q": q, "pi": repr(pi)},
            "ok": ok, "cases": cases}


# ---------------------------------------------------------------------------
# Bessel-Speh zeta operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WhittakerSample:
    """Right-translation parameter: W(g) = BS(g h) for h in GL_{kc}."""

    label: str
    h: np.ndarray


def whittaker_samples(q: int, k: int, c: int, extra: int = 8,
                      seed: int = _DEFAULT_SEED) -> list[WhittakerSample]:
    """Class-representative translates plus seeded invertible ones.

    The identity translate is among the class representatives.
    """
    n = k * c
    out = [WhittakerSample(f"class:{info.label}",
                           info.rep.astype(np.int64))
           for info in get_group(q, n).classes]
    for i, m in enumerate(_seeded_invertible(q, n, extra, seed)):
        out.append(WhittakerSample(f"seeded:{i}", m))
    return out


def _block_antidiagonal(k: int, c: int) -> np.ndarray:
    """k x k block antidiagonal matrix with identity c x c blocks."""
    w = np.zeros((k * c, k * c), dtype=np.int64)
    for i in range(k):
        w[i * c:(i + 1) * c, (k - 1 - i) * c:(k - i) * c] = identity(c)
    return w


def _zj_block_matrix(k: int, c: int, j: int, g: np.ndarray,
                     x: np.ndarray) -> np.ndarray:
    """diag-embedded argument of Z_j: rows [c, (k-2-j)c, (j+1)c]."""
    n = k * c
    m = np.zeros((n, n), dtype=np.int64)
    r = (k - 2 - j) * c
    m[0:c, 0:c] = g
    if r:
        m[c:c + r, 0:c] = x
        m[c:c + r, c:c + r] = identity(r)
    m[c + r:n, c + r:n] = identity(n - c - r)
    return m


def _zstarj_block_matrix(k: int, c: int, j: int, g: np.ndarray,
                         x: np.ndarray) -> np.ndarray:
    """Argument of Z*_j: rows [(k-1-j)c, jc, c], cols [c, (k-1-j)c, jc]."""
    n = k * c
    m = np.zeros((n, n), dtype=np.int64)
    top = (k - 1 - j) * c
    m[0:top, c:c + top] = identity(top)
    if j:
        m[top:top + j * c, c + top:n] = identity(j * c)
        m[n - c:n, c + top:n] = x
    m[n - c:n, 0:c] = g
    return m


def _right_translate(F, mats: np.ndarray, h: np.ndarray) -> np.ndarray:
    if F.e == 1:
        return np.remainder(mats @ h.astype(np.int64), F.p)
    return np.stack([mat_mul(F, mats[i], h) for i in range(mats.shape[0])])


def _zeta_coefficients(q: int, tau: tuple[Datum, ...], c: int, j: int,
                       h: np.ndarray, t: int,
                       star: bool) -> list[ScaledCyclotomic]:
    """Coefficient vector of Z_j (or Z*_j) for W(g) = BS(g h).

    Folding the X sweep into the coefficient of each g in GL_c gives
    b_j(g) = q^{-(k-2-j)c^2/2} sum_X W(M_j(g, X) h) and likewise
    b*_j(g) = q^{-jc^2/2} sum_X W(M*_j(g, X) h).
    """
    k = tau_degree(tau)
    fg = flat_group(q, c)
    ring = get_ring(q)
    if star:
        rows, cols = c, j * c
        build = _zstarj_block_matrix
        norm = ring.q_half_power(-j * c * c)
    else:
        rows, cols = (k - 2 - j) * c, c
        build = _zj_block_matrix
        norm = ring.q_half_power(-(k - 2 - j) * c * c)
    xblocks = all_mats(q, rows, cols)
    nx = xblocks.shape[0]
    radical_size = q ** (c * c * k * (k - 1) // 2)
    cost = fg.size * nx * radical_size
    if cost > ZETA_BUDGET:
        raise BudgetError(
            f"zeta sweep needs {fg.size} x {nx} x {radical_size} = {cost} "
            f"products (q={q}, k={k}, c={c}, j={j}), over "
            f"ZETA_BUDGET={ZETA_BUDGET}")
    n = k * c
    mats = np.empty((fg.size * nx, n, n), dtype=np.int64)
    pos = 0
    for gi in range(fg.size):
        g = fg.mats[gi]
        for xi in range(nx):
            mats[pos] = build(k, c, j, g, xblocks[xi])
            pos += 1
    wvals = bessel_speh_values(q, tau, c,
                               _right_translate(fg.ctx.F, mats, h), t)
    coeffs = []
    for gi in range(fg.size):
        total = ring.zero
        for xi in range(nx):
            total = total + wvals[gi * nx + xi]
        coeffs.append(total * norm)
    return coeffs


def gk_zeta_profiles(q: int, pi: RepSpec, tau, c: int, j: int,
                     sample: WhittakerSample | np.ndarray,
                     t: int = 1) -> tuple[TraceProfile, TraceProfile]:
    """Trace profiles of (Z_j, Z*_j) for pi against W(g) = BS(g h)."""
    data = generic_data(q, tau)
    k = tau_degree(data)
    assert k >= 2 and 0 <= j <= k - 2, "need k >= 2 and 0 <= j <= k-2"
    assert spec_degree(pi) == c
    h = sample.h if isinstance(sample, WhittakerSample) else sample
    h = np.asarray(h, dtype=np.int64)
    chi = char_of_repspec(q, pi)
    xs = [info.rep for info in get_group(q, c).classes]
    b = _zeta_coefficients(q, data, c, j, h, t, star=False)
    bs = _zeta_coefficients(q, data, c, j, h, t, star=True)
    return (TraceProfile(q, c, tuple(_pair_profile(q, c, b, chi, xs))),
            TraceProfile(q, c, tuple(_pair_profile(q, c, bs, chi, xs))))


def check_kaplan_fe(q: int, pi: RepSpec, tau, c: int, t: int = 1,
                    extra: int = 8, seed: int = _DEFAULT_SEED) -> dict:
    """Z*_j = Gamma(pi, tau, psi) Z_j for all j and sampled W, exactly.

    Also checks the contragredient relation (dual data, inverse additive
    character, conjugate gamma) and that gamma times its contragredient
    partner is 1.  Gated on disjoint cuspidal supports; the measured
    gamma is reported on every skip.
    """
    data = generic_data(q, tau)
    k = tau_degree(data)
    if k < 2:
        raise UnsupportedRepError(
            "the zeta-operator sweep needs k >= 2; at k = 1 use the "
            "twisted Godement-Jacquet equation")
    params = {"q": q, "pi": repr(pi), "tau": [repr(d) for d in data],
              "c": c, "k": k, "t": t, "extra": extra, "seed": seed}
    suite = "gk-fe"
    dual_data = tuple(dual_datum(d) for d in data)
    gamma = gamma_gk(q, pi, data, t).value
    if not supports_disjoint(q, pi, induced_spec(dual_data)):
        return {"suite": suite, "params": params, "ok": True,
                "cases": [{"name": "gate", "status": "skipped",
                           "reason": "cuspidal supports intersect; "
                                     "equation not applicable",
                           "measured_gamma": gamma.serialize()}]}
    fg = flat_group(q, c)
    radical_size = q ** (c * c * k * (k - 1) // 2)
    worst = max(max(q ** ((k - 2 - j) * c * c), q ** (j * c * c))
                for j in range(k - 1))
    cost = fg.size * worst * radical_size
    if cost > ZETA_BUDGET:
        return {"suite": suite, "params": params, "ok": True,
                "cases": [{"name": "budget", "status": "skipped",
                           "reason": f"largest zeta sweep needs {fg.size} x "
                                     f"{worst} x {radical_size} = {cost} "
                                     f"products, over "
                                     f"ZETA_BUDGET={ZETA_BUDGET}",
                           "measured_gamma": gamma.serialize()}]}
    ring = get_ring(q)
    cases = []
    for sample in whittaker_samples(q, k, c, extra, seed):
        for j in range(k - 1):
            zp, zsp = gk_zeta_profiles(q, pi, data, c, j, sample, t)
            bad = None
            for i, (lv, rv) in enumerate(zip(zsp.values, zp.values)):
                if not (lv - gamma * rv).is_zero():
                    bad = (i, lv, gamma * rv)
                    break
            name = f"h={sample.label},j={j}"
            if bad is None:
                cases.append({"name": name, "status": "pass"})
            else:
                i, lv, rv = bad
                cases.append({"name": name, "status": "fail",
                              "witness": f"x#{i}", "lhs": lv.serialize(),
                              "rhs": rv.serialize()})
    F1 = get_group(q, 1).F
    gamma_dual = gamma_gk(q, dual_spec(pi), dual_data,
                          int(F1.neg[t % q])).value
    good = (gamma_dual - gamma.conj()).is_zero()
    cases.append({"name": "contragredient",
                  "status": "pass" if good else "fail",
                  "lhs": gamma_dual.serialize(),
                  "rhs": gamma.conj().serialize()})
    good = (gamma * gamma_dual - ring.one).is_zero()
    cases.append({"name": "gamma-double",
                  "status": "pass" if good else "fail",
                  "lhs": (gamma * gamma_dual).serialize(), "rhs": "1"})
    ok = all(case["status"] == "pass" for case in cases)
    return {"suite": suite, "params": params, "ok": ok, "cases": cases}


# ---------------------------------------------------------------------------
# functional equation with a function variable
# ---------------------------------------------------------------------------

def _fn_sweep_tables(q: int, tau: tuple[Datum, ...], c: int, h: np.ndarray,
                     t: int) -> tuple[list, list]:
    """Per-sample tables for the function-variant equation.

    Returns (w, wdiag) where w[gi][ycode] = sum_X W(M(g, Y, X) h) over
    the free block X in M_{c x (k-2)c}, with M(g, Y, X) the matrix with
    row blocks [c, (k-2)c, c]: [[0, I, 0], [0, 0, I], [g, Y, X]], and
    wdiag[gi] = W(diag(g, I) h).
    """
    k = tau_degree(tau)
    fg = flat_group(q, c)
    n = k * c
    ymats = all_mats(q, c, c)
    xmats = all_mats(q, c, (k - 2) * c)
    ny, nx = ymats.shape[0], xmats.shape[0]
    radical_size = q ** (c * c * k * (k - 1) // 2)
    cost = fg.size * ny * nx * radical_size
    if cost > ZETA_BUDGET:
        raise BudgetError(
            f"function-variant sweep needs {fg.size} x {ny} x {nx} x "
            f"{radical_size} = {cost} products (q={q}, k={k}, c={c}), "
            f"over ZETA_BUDGET={ZETA_BUDGET}")
    mid = (k - 2) * c
    stack = np.empty((fg.size * ny * nx, n, n), dtype=np.int64)
    pos = 0
    for gi in range(fg.size):
        g = fg.mats[gi]
        for yi in range(ny):
            for xi in range(nx):
                m = np.zeros((n, n), dtype=np.int64)
                m[0:c, c:2 * c] = identity(c)
                if mid:
                    m[c:c + mid, 2 * c:n] = identity(mid)
                m[n - c:n, 0:c] = g
                m[n - c:n, c:2 * c] = ymats[yi]
                if mid:
                    m[n - c:n, 2 * c:n] = xmats[xi]
                stack[pos] = m
                pos += 1
    vals = bessel_speh_values(q, tau, c,
                              _right_translate(fg.ctx.F, stack, h), t)
    ring = get_ring(q)
    w = []
    for gi in range(fg.size):
        row = []
        for yi in range(ny):
            total = ring.zero
            base = (gi * ny + yi) * nx
            for xi in range(nx):
                total = total + vals[base + xi]
            row.append(total)
        w.append(row)
    diag_stack = np.empty((fg.size, n, n), dtype=np.int64)
    for gi in range(fg.size):
        m = identity(n)
        m[0:c, 0:c] = fg.mats[gi]
        diag_stack[gi] = m
    wdiag = bessel_speh_values(q, tau, c,
                               _right_translate(fg.ctx.F, diag_stack, h), t)
    return w, wdiag


def _fn_zstar_coeffs(q: int, c: int, k: int, w: list,
                     fhat: MatFunction) -> list[ScaledCyclotomic]:
    """b*(g) = q^{-(k-1)c^2/2} sum_Y w[g][Y] (F_{psi^{-1}} f)(g^{-1} Y)."""
    fg = flat_group(q, c)
    ring = get_ring(q)
    ymats = all_mats(q, c, c)
    norm = ring.q_half_power(-(k - 1) * c * c)
    coeffs = []
    for gi in range(fg.size):
        ginv = fg.mats[int(fg.inv_idx[gi])]
        total = ring.zero
        for yi in range(ymats.shape[0]):
            fv = fhat.values[mat_code(q, mat_mul(fg.ctx.F, ginv,
                                                 ymats[yi]))]
            if not fv.is_zero():
                total = total + w[gi][yi] * fv
        coeffs.append(total * norm)
    return coeffs


def check_fe_with_function(q: int, pi: RepSpec, tau, c: int, t: int = 1,
                           extra: int = 4,
                           seed: int = _DEFAULT_SEED) -> dict:
    """Functional equation of the zeta operators with a function variable.

    For k >= 2 and each sampled W, the pair Z(W, f) = sum_g W(diag(g, I) h)
    f(g) pi(g) and Z*(W, f) = q^{-(k-1)c^2/2} sum_{X,Y,g} W(...) times
    (F_{psi^{-1}} f)(g^{-1} Y) pi(g) satisfies Z* = Gamma Z over the full
    delta basis; f = 1 collapses both sides to the j = k-2 operators.
    At k = 1 this is the twisted Godement-Jacquet equation with gamma
    supplied by the rank-one kernel.
    """
    data = generic_data(q, tau)
    k = tau_degree(data)
    assert spec_degree(pi) == c
    params = {"q": q, "pi": repr(pi), "tau": [repr(d) for d in data],
              "c": c, "k": k, "t": t, "extra": extra, "seed": seed}
    suite = "gk-fe-fn"
    dual_data = tuple(dual_datum(d) for d in data)
    gamma = gamma_gk(q, pi, data, t).value
    if not supports_disjoint(q, pi, induced_spec(dual_data)):
        return {"suite": suite, "params": params, "ok": True,
                "cases": [{"name": "gate", "status": "skipped",
                           "reason": "cuspidal supports intersect; "
                                     "equation not applicable",
                           "measured_gamma": gamma.serialize()}]}
    chi = char_of_repspec(q, pi)
    ring = get_ring(q)
    xs = [info.rep for info in get_group(q, c).classes]
    if k == 1:
        a = data[0].a
        cases = _delta_fe_cases(q, c, chi, a, gamma, t, xs, prefix="k=1,")
        ok = all(case["status"] == "pass" for case in cases)
        return {"suite": suite, "params": params, "ok": ok, "cases": cases}
    fg = flat_group(q, c)
    tneg = int(fg.ctx.F.neg[t % q])
    if c == 1:
        samples = whittaker_samples(q, k, c, extra, seed)
    else:
        samples = [WhittakerSample("identity", identity(k * c))]
    cmats = all_mats(q, c, c)
    cases = []
    for sample in samples:
        w, wdiag = _fn_sweep_tables(q, data, c, sample.h, t)
        # f = 1 must collapse to the j = k-2 operator pair
        one = constant_function(q, c, ring.one)
        b_one = [wdiag[gi] for gi in range(fg.size)]
        bstar_one = _fn_zstar_coeffs(q, c, k, w,
                                     fourier_transform(one, tneg))
        bj = _zeta_coefficients(q, data, c, k - 2, sample.h, t, star=False)
        bsj = _zeta_coefficients(q, data, c, k - 2, sample.h, t, star=True)
        good = all((u - v).is_zero() for u, v in zip(b_one, bj))
        good = good and all((u - v).is_zero()
                            for u, v in zip(bstar_one, bsj))
        cases.append({"name": f"h={sample.label},f=1-collapse",
                      "status": "pass" if good else "fail"})
        for code in range(cmats.shape[0]):
            z = cmats[code]
            fz = delta_function(q, c, z)
            bstar = _fn_zstar_coeffs(q, c, k, w,
                                     fourier_transform(fz, tneg))
            lhs_vals = _pair_profile(q, c, bstar, chi, xs)
            if mat_det(fg.ctx.F, z) != 0:
                gz = fg.index_of(z)
                b = [ring.zero] * fg.size
                b[gz] = wdiag[gz]
                rhs_vals = _pair_profile(q, c, b, chi, xs)
            else:
                rhs_vals = [ring.zero] * len(xs)
            bad = None
            for i, (lv, rv) in enumerate(zip(lhs_vals, rhs_vals)):
                if not (lv - gamma * rv).is_zero():
                    bad = (i, lv, gamma * rv)
                    break
            name = f"h={sample.label},delta={code}"
            if bad is None:
                cases.append({"name": name, "status": "pass"})
            else:
                i, lv, rv = bad
                cases.append({"name": name, "status": "fail",
                              "witness": f"x#{i}", "lhs": lv.serialize(),
                              "rhs": rv.serialize()})
    ok = all(case["status"] == "pass" for case in cases)
    return {"suite": suite, "params": params, "ok": ok, "cases": cases}


# ---------------------------------------------------------------------------
# transpose-dual identity
# ---------------------------------------------------------------------------

def check_zeta_dual_identity(q: int, pi: RepSpec, tau, c: int, t: int = 1,
                             extra: int = 2,
                             seed: int = _DEFAULT_SEED) -> dict:
    """Z*_j of W against pi equals Z_{k-2-j} of the flipped Whittaker
    function W'(m) = W(w tm^{-1} tD^{-1}) against the dual of pi.

    Here w is the full block antidiagonal of GL_{kc}, D = diag(I_c, w')
    with w' the block antidiagonal of GL_{(k-1)c}, and the dual of pi is
    realized on the same space by g -> tg^{-1}.
    """
    data = generic_data(q, tau)
    k = tau_degree(data)
    assert k >= 2
    params = {"q": q, "pi": repr(pi), "tau": [repr(d) for d in data],
              "c": c, "k": k, "t": t, "extra": extra, "seed": seed}
    fg = flat_group(q, c)
    F = fg.ctx.F
    ring = get_ring(q)
    chi = char_of_repspec(q, pi)
    xs = [info.rep for info in get_group(q, c).classes]
    n = k * c
    w_full = _block_antidiagonal(k, c)
    d_mat = identity(n)
    d_mat[c:, c:] = _block_antidiagonal(k - 1, c)
    tdinv = transpose_inverse(F, d_mat)
    hs = [("identity", identity(n))]
    hs += [(f"seeded:{i}", m)
           for i, m in enumerate(_seeded_invertible(q, n, extra, seed))]
    cases = []
    for label, h in hs:
        for j in range(k - 1):
            lhs_coeffs = _zeta_coefficients(q, data, c, j, h, t, star=True)
            lhs_vals = _pair_profile(q, c, lhs_coeffs, chi, xs)
            # right side: Z_{k-2-j} coefficients of the flipped function
            jr = k - 2 - j
            rows = (k - 2 - jr) * c
            xblocks = all_mats(q, rows, c)
            nx = xblocks.shape[0]
            stack = np.empty((fg.size * nx, n, n), dtype=np.int64)
            pos = 0
            for yi in range(fg.size):
                y = fg.mats[yi]
                for xi in range(nx):
                    m = _zj_block_matrix(k, c, jr, y, xblocks[xi])
                    arg = mat_mul(F, w_full, transpose_inverse(F, m))
                    arg = mat_mul(F, arg, tdinv)
                    stack[pos] = mat_mul(F, arg, h)
                    pos += 1
            vals = bessel_speh_values(q, data, c, stack, t)
            norm = ring.q_half_power(-(k - 2 - jr) * c * c)
            rhs_coeffs = []
            for yi in range(fg.size):
                total = ring.zero
                for xi in range(nx):
                    total = total + vals[yi * nx + xi]
                rhs_coeffs.append(total * norm)
            rhs_vals = _pair_profile(q, c, rhs_coeffs, chi, xs,
                                     contragredient=True)
            good = all((lv - rv).is_zero()
                       for lv, rv in zip(lhs_vals, rhs_vals))
            cases.append({"name": f"h={label},j={j}",
                          "status": "pass" if good else "fail"})
    ok = all(case["status"] == "pass" for case in cases)
    return {"suite": "gk-fe-dual", "params": params, "ok": ok,
            "cases": cases}


# ---------------------------------------------------------------------------
# converse scan
# ---------------------------------------------------------------------------

def _cusp2_orbit_reps(q: int) -> list[int]:
    """Regular character exponents of F_{q^2}, one per Frobenius orbit."""
    reps = []
    for tt in range(1, q * q - 1):
        if tt % (q + 1) == 0:
            continue
        if min(tt, (tt * q) % (q * q - 1)) == tt:
            reps.append(tt)
    return reps


def generic_specs(q: int, k: int) -> list[RepSpec]:
    """The supported generic irreducible specs of GL_k(F_q)."""
    specs: list[RepSpec] = []
    if k == 1:
        return [DetTwist(1, a) for a in range(q - 1)]
    if k == 2:
        for pair in itertools.combinations(range(q - 1), 2):
            specs.append(PrincipalSeriesRegular(pair))
        specs.extend(SteinbergTwist(a) for a in range(q - 1))
        specs.extend(Cuspidal2(tt) for tt in _cusp2_orbit_reps(q))
        return specs
    if k == 3:
        for trip in itertools.combinations(range(q - 1), 3):
            specs.append(PrincipalSeriesRegular(trip))
        for a in range(q - 1):
            for tt in _cusp2_orbit_reps(q):
                specs.append(InducedCuspidals((GL1Datum(a),
                                               Cusp2Datum(tt))))
        return specs
    raise UnsupportedRepError(f"no generic enumeration for degree {k}")


def converse_scan(q: int, k: int = 2, t: int = 1) -> dict:
    """Separate every pair of generic specs with equal central character
    by a rank-one Bessel value J(antidiag(I, h)), h in F_q^x."""
    specs = generic_specs(q, k)
    params = {"q": q, "k": k, "t": t}
    profiles = []
    for spec in specs:
        chi = char_of_repspec(q, spec)
        prof = [bessel_J(chi,
                         antidiagonal_embed(
                             np.array([[h]], dtype=np.int64), k, 1), t)
                for h in range(1, q)]
        profiles.append(prof)
    cases = []
    # identical specs give identical profiles: recompute one afresh
    if specs:
        chi0 = char_of_repspec(q, specs[0])
        again = [bessel_J(chi0,
                          antidiagonal_embed(
                              np.array([[h]], dtype=np.int64), k, 1), t)
                 for h in range(1, q)]
        good = all((u - v).is_zero() for u, v in zip(profiles[0], again))
        cases.append({"name": f"self:{specs[0]!r}",
                      "status": "pass" if good else "fail"})
    for i in range(len(specs)):
        for jdx in range(i + 1, len(specs)):
            name = f"{specs[i]!r} vs {specs[jdx]!r}"
            if central_exponent(q, specs[i]) != central_exponent(q,
                                                                 specs[jdx]):
                cases.append({"name": name, "status": "skipped",
                              "reason": "central characters differ"})
                continue
            witness = None
            for m, (u, v) in enumerate(zip(profiles[i], profiles[jdx])):
                if not (u - v).is_zero():
                    witness = m + 1
                    break
            if witness is None:
                cases.append({"name": name, "status": "fail",
                              "reason": "pair not separated by any "
                                        "rank-one Bessel value"})
            else:
                cases.append({"name": name, "status": "pass",
                              "witness": f"h={witness}"})
    ok = all(case["status"] != "fail" for case in cases)
    return {"suite": "converse", "params": params, "ok": ok, "cases": cases}


# ---------------------------------------------------------------------------
# corner values of BS on GL_4 via GL_2 Bessel values
# ---------------------------------------------------------------------------

def check_appendix_c2(q: int, tparam: int, t: int = 1, extra: int = 24,
                      seed: int = _DEFAULT_SEED) -> dict:
    """Two-term expansion of the rank-two corner value of BS.

    For tau cuspidal on GL_2 with regular exponent tparam and any h in
    GL_2: BS at antidiag(I_2, h) equals q^{-2} times the sum over s in
    F_q^x of J(m_s h m_s^{-1}) psi_t(s^{-1} c') plus, when the (2,1)
    entry of h vanishes, q^{-1} J(antidiag(1, a)) J(antidiag(1, d));
    here m_s = diag(s, 1), c' is the (2,1) entry of h^{-1}, and a, d
    are the diagonal entries of h.
    """
    tau = (Cusp2Datum(tparam),)
    params = {"q": q, "tparam": tparam, "t": t, "extra": extra,
              "seed": seed}
    chi = char_of_repspec(q, Cuspidal2(tparam))
    ring = get_ring(q)
    ctx2 = get_group(q, 2)
    F = ctx2.F
    hs = [(f"class:{info.label}", info.rep.astype(np.int64))
          for info in ctx2.classes]
    hs += [(f"seeded:{i}", m)
           for i, m in enumerate(_seeded_invertible(q, 2, extra, seed))]
    cases = []
    for label, h in hs:
        lhs = bessel_speh_value(q, tau, 2, antidiagonal_embed(h, 2, 2), t)
        cprime = int(mat_inv(F, h)[1, 0])
        total = ring.zero
        for s in range(1, q):
            m = np.array([[s, 0], [0, 1]], dtype=np.int64)
            conj = mat_mul(F, mat_mul(F, m, h), mat_inv(F, m))
            jv = bessel_J(chi, conj, t)
            total = total + jv * psi_value(
                ring, F, int(F.mul[int(F.inv[s]), cprime]), t)
        rhs = total.scale(Fraction(1, q * q))
        if int(h[1, 0]) == 0:
            ja = bessel_J(chi, antidiagonal_embed(
                np.array([[int(h[0, 0])]], dtype=np.int64), 2, 1), t)
            jd = bessel_J(chi, antidiagonal_embed(
                np.array([[int(h[1, 1])]], dtype=np.int64), 2, 1), t)
            rhs = rhs + (ja * jd).scale(Fraction(1, q))
        if (lhs - rhs).is_zero():
            cases.append({"name": f"h={label}", "status": "pass"})
        else:
            cases.append({"name": f"h={label}", "status": "fail",
                          "lhs": lhs.serialize(), "rhs": rhs.serialize()})
    ok = all(case["status"] == "pass" for case in cases)
    return {"suite": "appendix-c2", "params": params, "ok": ok,
            "cases": cases}
