"""Bessel and Bessel-Speh functions as psi-projector traces.

For an irreducible generic pi of GL_n with character chi, the normalized
Bessel function is

    J(g) = (1/|U_n|) sum over u in U_n of chi(g u) psi^{-1}(u),

where psi(u) = psi(u_{12} + u_{23} + ...).  Multiplicity one makes the
psi-projector rank one, so J(1) = 1; that normalization is asserted on
first use and a failure means the input character was not generic.

The Bessel-Speh function attached to an ordered tuple of cuspidal data
(tau, with k = total degree) and a block size c generalizes this: the
big character on GL_{kc} is the parabolic induction of the generalized
Speh blocks Speh(sigma_i, c) (one block per datum; see characters), N is
the (c,...,c) block unipotent radical, and

    BS(g) = (1/|N|) sum over u in N of chi_big(g u) psi_{(k,c)}^{-1}(u)

with psi_{(k,c)}(u) = psi(sum of traces of the superdiagonal c x c
blocks).  BS(1) = 1 is asserted, never normalized away: inducing from
the full multiset of cuspidals with each datum repeated c times fails
this normalization (the projector has rank > 1), which is why the Speh
blocks are used.

The special-value class function attached to (tau, c) is

    B_tau(h) = BS([[0, I_{(k-1)c}], [h, 0]])          for k >= 2,
    B_tau(h) = alpha(det h) psi(tr h^{-1})            for k = 1,

a GL_c-conjugation-invariant function evaluated once per class.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .characters import (ClassFunction, Datum, GL1Datum, central_exponent,
                         char_of_datum, datum_degree, get_ring, induced_char,
                         speh_block_char, InducedCuspidals)
from .cyclo import ScaledCyclotomic
from .ffield import FieldContext
from .glclasses import (get_group, identity, mat_det, mat_inv, mat_mul,
                        mat_trace)

_CHUNK = 1 << 16


# ---------------------------------------------------------------------------
# additive characters
# ---------------------------------------------------------------------------

def psi_value(ring, F: FieldContext, x: int, t: int = 1) -> ScaledCyclotomic:
    """psi_t(x) = zeta_p^{Tr(t x)}."""
    assert t % F.q != 0
    return ring.root_of_unity(F.p, int(F.trace[F.mul[t % F.q, x % F.q]]))

def _superdiag_positions(k: int, c: int) -> list[tuple[int, int]]:
    return [(i * c + j, (i + 1) * c + j)
            for i in range(k - 1) for j in range(c)]

def psi_kc_exponent(F: FieldContext, u: np.ndarray, k: int, c: int,
                    t: int = 1) -> int:
    """Exponent e with psi_{(k,c),t}(u) = zeta_p^e."""
    total = 0
    for r, col in _superdiag_positions(k, c):
        total = F.add[total, u[r, col]]
    return int(F.trace[F.mul[t % F.q, total]])

def _batched_psi_kc_exponents(F: FieldContext, mats: np.ndarray, k: int,
                              c: int, t: int) -> np.ndarray:
    pos = _superdiag_positions(k, c)
    if F.e == 1:
        s = np.zeros(mats.shape[0], dtype=np.int64)
        for r, col in pos:
            s += mats[:, r, col].astype(np.int64)
        return (t * s) % F.p
    s = np.zeros(mats.shape[0], dtype=np.int64)
    for r, col in pos:
        s = F.add[s, mats[:, r, col].astype(np.int64)]
    return F.trace[F.mul[t % F.q, s]].astype(np.int64)


# ---------------------------------------------------------------------------
# projector-trace sums
# ---------------------------------------------------------------------------

def _projector_sum(chi: ClassFunction, g: np.ndarray, radical: np.ndarray,
                   exps: np.ndarray) -> ScaledCyclotomic:
    """(1/|N|) sum over the radical of chi(g u) zeta_p^{-e(u)}."""
    ctx = chi.ctx
    ring = chi.ring
    p = ctx.F.p
    nvals = len(chi.values)
    counts = np.zeros(nvals * p, dtype=np.int64)
    B = radical.shape[0]
    if ctx.F.e == 1:
        g64 = g.astype(np.float64)
        for lo in range(0, B, _CHUNK):
            part = radical[lo:lo + _CHUNK]
            gu = np.remainder((g64 @ part.astype(np.float64)).astype(
                np.int64), p)
            cls = ctx.batch_class_indices(gu)
            key = cls * p + exps[lo:lo + part.shape[0]]
            counts += np.bincount(key, minlength=nvals * p)
    else:
        F = ctx.F
        for i in range(B):
            gu = mat_mul(F, g, radical[i].astype(np.int64))
            cls = ctx.class_index(gu)
            counts[cls * p + int(exps[i])] += 1
    zeta_neg = [ring.root_of_unity(p, -e) for e in range(p)]
    total = ring.zero
    for cls in range(nvals):
        for e in range(p):
            cnt = counts[cls * p + e]
            if cnt:
                total = total + (chi.values[cls] * zeta_neg[e]).scale(
                    int(cnt))
    return total.scale(Fraction(1, B))


def _projector_sums(chi: ClassFunction, gs: np.ndarray, radical: np.ndarray,
                    exps: np.ndarray) -> list[ScaledCyclotomic]:
    """Projector sums for a stack of group elements, one radical sweep."""
    ctx = chi.ctx
    ring = chi.ring
    p = ctx.F.p
    nvals = len(chi.values)
    B = radical.shape[0]
    M = gs.shape[0]
    if M == 0:
        return []
    stride = nvals * p
    counts = np.zeros(M * stride, dtype=np.int64)
    if ctx.F.e == 1:
        g64 = gs.astype(np.float64)
        step = max(1, _CHUNK // M)
        for lo in range(0, B, step):
            part = radical[lo:lo + step].astype(np.float64)
            nb = part.shape[0]
            gu = np.remainder(
                np.einsum("mij,ujk->muik", g64, part).astype(np.int64), p)
            cls = ctx.batch_class_indices(
                gu.reshape(M * nb, gs.shape[1], gs.shape[2]))
            key = (np.repeat(np.arange(M), nb) * nvals + cls) * p + np.tile(
                exps[lo:lo + nb], M)
            counts += np.bincount(key, minlength=M * stride)
    else:
        F = ctx.F
        for m in range(M):
            for i in range(B):
                gu = mat_mul(F, gs[m], radical[i].astype(np.int64))
                cls = ctx.class_index(gu)
                counts[(m * nvals + cls) * p + int(exps[i])] += 1
    zeta_neg = [ring.root_of_unity(p, -e) for e in range(p)]
    pair_cache: dict[int, ScaledCyclotomic] = {}
    out = []
    for m in range(M):
        block = counts[m * stride:(m + 1) * stride]
        total = ring.zero
        for cell in np.flatnonzero(block):
            cell = int(cell)
            val = pair_cache.get(cell)
            if val is None:
                val = chi.values[cell // p] * zeta_neg[cell % p]
                pair_cache[cell] = val
            total = total + val.scale(int(block[cell]))
        out.append(total.scale(Fraction(1, B)))
    return out


# ---------------------------------------------------------------------------
# Bessel function of a generic character
# ---------------------------------------------------------------------------

_J_CHECKED: dict[int, bool] = {}

def bessel_J(chi: ClassFunction, g: np.ndarray, t: int = 1) \
        -> ScaledCyclotomic:
    """Normalized Bessel function J(g) of the generic character chi."""
    ctx = chi.ctx
    n = ctx.n
    U = ctx.unipotent_radical((1,) * n)
    exps = _batched_psi_kc_exponents(ctx.F, U, n, 1, t)
    if id(chi) not in _J_CHECKED:
        _J_CHECKED[id(chi)] = True
        one = _projector_sum(chi, identity(n), U, exps)
        if not (one - chi.ring.one).is_zero():
            del _J_CHECKED[id(chi)]
            raise ArithmeticError(
                "J(1) != 1: the character is not irreducible generic")
    return _projector_sum(chi, g, U, exps)


# ---------------------------------------------------------------------------
# Bessel-Speh functions
# ---------------------------------------------------------------------------

def tau_degree(tau: tuple[Datum, ...]) -> int:
    return sum(datum_degree(d) for d in tau)

@lru_cache(maxsize=None)
def bs_induction_char(q: int, tau: tuple[Datum, ...], c: int) \
        -> ClassFunction:
    """Induced character of the Speh blocks of tau on GL_{kc}."""
    ring = get_ring(q)
    blocks = [speh_block_char(q, d, c) for d in tau]
    if len(blocks) == 1:
        return blocks[0]
    comp = tuple(datum_degree(d) * c for d in tau)
    return induced_char(ring, q, comp, blocks)

@lru_cache(maxsize=None)
def _bs_radical_exps(q: int, k: int, c: int, t: int):
    ctx = get_group(q, k * c)
    N = ctx.unipotent_radical((c,) * k)
    exps = _batched_psi_kc_exponents(ctx.F, N, k, c, t)
    return N, exps

@lru_cache(maxsize=None)
def _bs_normalization_checked(q: int, tau: tuple[Datum, ...], c: int,
                              t: int) -> bool:
    chi = bs_induction_char(q, tau, c)
    k = tau_degree(tau)
    N, exps = _bs_radical_exps(q, k, c, t)
    one = _projector_sum(chi, identity(k * c), N, exps)
    if not (one - chi.ring.one).is_zero():
        raise ArithmeticError(
            f"BS(1) != 1 for tau={tau}, c={c}: multiplicity-one "
            "normalization failed; refusing to normalize")
    # spot-check one-sided equivariance on the first superdiagonal unit
    if k >= 2:
        ctx = chi.ctx
        u0 = identity(k * c)
        u0[0, c] = 1
        e0 = psi_kc_exponent(ctx.F, u0, k, c, t)
        lhs = _projector_sum(chi, u0, N, exps)
        rhs = chi.ring.root_of_unity(ctx.F.p, e0)
        assert (lhs - rhs).is_zero(), "BS equivariance spot check failed"
    return True

def bessel_speh_value(q: int, tau: tuple[Datum, ...], c: int, g: np.ndarray,
                      t: int = 1) -> ScaledCyclotomic:
    """BS(g) for the Bessel-Speh function of (tau, c)."""
    _bs_normalization_checked(q, tau, c, t)
    chi = bs_induction_char(q, tau, c)
    k = tau_degree(tau)
    N, exps = _bs_radical_exps(q, k, c, t)
    return _projector_sum(chi, np.asarray(g, dtype=np.int64), N, exps)

def bessel_speh_values(q: int, tau: tuple[Datum, ...], c: int,
                       mats: np.ndarray, t: int = 1) \
        -> list[ScaledCyclotomic]:
    """BS at every matrix of a stack, sharing one radical sweep."""
    _bs_normalization_checked(q, tau, c, t)
    chi = bs_induction_char(q, tau, c)
    k = tau_degree(tau)
    N, exps = _bs_radical_exps(q, k, c, t)
    return _projector_sums(chi, np.asarray(mats, dtype=np.int64), N, exps)


def antidiagonal_embed(h: np.ndarray, k: int, c: int) -> np.ndarray:
    """[[0, I_{(k-1)c}], [h, 0]] in GL_{kc}."""
    n = k * c
    w = np.zeros((n, n), dtype=np.int64)
    m = (k - 1) * c
    if m:
        w[0:m, c:n] = identity(m)
    w[m:n, 0:c] = h
    return w


# ---------------------------------------------------------------------------
# special-value profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BesselProfile:
    q: int
    c: int
    k: int
    tau: tuple[Datum, ...]
    t: int
    values: tuple[ScaledCyclotomic, ...]

    def group(self):
        return get_group(self.q, self.c)

    def value_at(self, h: np.ndarray) -> ScaledCyclotomic:
        return self.values[self.group().class_index(h)]

@lru_cache(maxsize=None)
def special_value_profile(q: int, tau: tuple[Datum, ...], c: int,
                          t: int = 1) -> BesselProfile:
    """B_tau(h), one exact value per conjugacy class of GL_c."""
    ring = get_ring(q)
    ctxc = get_group(q, c)
    k = tau_degree(tau)
    if k == 1:
        datum = tau[0]
        assert isinstance(datum, GL1Datum)
        F = ctxc.F
        vals = []
        for info in ctxc.classes:
            hinv = mat_inv(F, info.rep)
            alpha = ring.root_of_unity(
                q - 1, datum.a * int(F.dlog[mat_det(F, info.rep)]))
            vals.append(alpha * psi_value(ring, F, mat_trace(F, hinv), t))
        return BesselProfile(q, c, k, tau, t, tuple(vals))
    vals = []
    for info in ctxc.classes:
        w = antidiagonal_embed(info.rep, k, c)
        vals.append(bessel_speh_value(q, tau, c, w, t))
    return BesselProfile(q, c, k, tau, t, tuple(vals))

# ---------------------------------------------------------------------------
# support property
# ---------------------------------------------------------------------------

def bs_support_check(q: int, tau: tuple[Datum, ...], c: int, t: int = 1) \
        -> dict:
    """Verify BS(diag(g, I)) = 0 for every non-identity class of GL_c.

    Returns {"ok": bool, "witnesses": [...]} with the labels of any
    violating classes.
    """
    ctxc = get_group(q, c)
    k = tau_degree(tau)
    n = k * c
    labels = []
    mats = []
    for info in ctxc.classes:
        if np.array_equal(info.rep, identity(c)):
            continue
        g = identity(n)
        g[0:c, 0:c] = info.rep
        labels.append(info.label)
        mats.append(g)
    if not mats:
        return {"ok": True, "witnesses": []}
    vals = bessel_speh_values(q, tau, c, np.stack(mats), t)
    witnesses = [label for label, val in zip(labels, vals)
                 if not val.is_zero()]
    return {"ok": not witnesses, "witnesses": witnesses}

def omega_tau_exponent(q: int, tau: tuple[Datum, ...]) -> int:
    """Central-character exponent of the generic representation of tau."""
    return central_exponent(q, InducedCuspidals(tau))
