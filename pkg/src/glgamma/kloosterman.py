"""Twisted matrix Kloosterman sums over GL_c(F_q).

For a tuple of multiplicative-character exponents alpha = (a_1, ..., a_k)
mod q - 1 and the additive character psi_t, the twisted matrix Kloosterman
sum at h in GL_c(F_q) is

    Kl(alpha, psi_t, h) = sum over (x_1, ..., x_k) in GL_c^k with
        x_1 x_2 ... x_k = h   of
        prod_j alpha_{a_j}(det x_j) * psi_t(tr x_1 + ... + tr x_k).

It is a class function of h.  The free tuple (x_1, ..., x_{k-1}) is
enumerated once per class of h and x_k is solved for; the alpha-independent
content of the enumeration is compressed into a small count tensor indexed
by the det-exponent digits and the additive trace, so every alpha tuple
(and every psi twist) is read off the same pass.

Exact identities checked here:

  * bridge to the Bessel-Speh special value of the principal series with
    pairwise distinct exponents alpha:
        B_tau(h) = q^{-(k-1)c^2} Kl(alpha^{-1}, psi, (-1)^{k-1} h^{-1});
  * summed multiplicativity over the block-upper unipotent radical:
        sum over n in N_{(c1,c2)} of Kl(alpha, psi, n diag(h1, h2))
            = q^{k c1 c2} Kl(alpha, psi, h1) Kl(alpha, psi, h2);
  * the product formula with factor q^{(k-1) c1 c2} when h1 and h2 have
    disjoint spectra (characteristic polynomials sharing no irreducible
    factor).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .characters import GL1Datum, get_ring
from .cyclo import ScaledCyclotomic
from .ffield import FieldContext, factor_monic
from .glclasses import (BudgetError, GroupContext, batched_charpoly_mod_p,
                        batched_matmul_mod_p, block_diag, charpoly, get_group,
                        mat_inv, mat_mul)
from .whittaker import psi_value, special_value_profile

KL_BUDGET = 100_000_000       # max free tuples |GL_c|^{k-1} per sum
KL_TENSOR_BUDGET = 4_000_000  # max histogram cells (q-1)^k * q
_CHUNK = 1 << 20              # free tuples expanded per accumulation slice


# ---------------------------------------------------------------------------
# flat group enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlatGroup:
    """GL_c(F_q) as parallel index arrays keyed by a base-q matrix code."""
    ctx: GroupContext
    mats: np.ndarray           # (N, c, c) int64
    det_dlog: np.ndarray       # (N,) discrete log of det
    tr: np.ndarray             # (N,) trace as a field element
    inv_idx: np.ndarray        # (N,) index of the inverse
    class_idx: np.ndarray      # (N,) conjugacy-class index
    index_of_code: np.ndarray  # (q^{c^2},) int64, -1 off the group

    @property
    def size(self) -> int:
        return self.mats.shape[0]

    def codes(self, mats: np.ndarray) -> np.ndarray:
        c = self.ctx.n
        flat = np.asarray(mats, dtype=np.int64).reshape(-1, c * c)
        weights = self.ctx.q ** np.arange(c * c, dtype=np.int64)
        return flat @ weights

    def index_of(self, mat: np.ndarray) -> int:
        idx = int(self.index_of_code[int(self.codes(mat[None])[0])])
        if idx < 0:
            raise ValueError("matrix is not invertible")
        return idx

    def indices_of(self, mats: np.ndarray) -> np.ndarray:
        idx = self.index_of_code[self.codes(mats)]
        assert (idx >= 0).all(), "product left the group"
        return idx

    def products(self, ia: np.ndarray, ib: np.ndarray) -> np.ndarray:
        """Indices of the pairwise products mats[ia] @ mats[ib]."""
        F = self.ctx.F
        A, B = self.mats[ia], self.mats[ib]
        if F.e == 1:
            prod = batched_matmul_mod_p(A, B, F.p)
        else:
            c = self.ctx.n
            prod = np.zeros_like(A)
            for i in range(c):
                for j in range(c):
                    acc = np.zeros(A.shape[0], dtype=np.int64)
                    for l in range(c):
                        acc = F.add[acc, F.mul[A[:, i, l], B[:, l, j]]]
                    prod[:, i, j] = acc
        return self.indices_of(prod)


def _batched_det(F: FieldContext, mats: np.ndarray) -> np.ndarray:
    """Determinant of every matrix in a (N, c, c) batch, as field labels."""
    c = mats.shape[1]
    if c == 1:
        return mats[:, 0, 0]
    if c == 2:
        return F.add[F.mul[mats[:, 0, 0], mats[:, 1, 1]],
                     F.neg[F.mul[mats[:, 0, 1], mats[:, 1, 0]]]]
    if F.e == 1:
        const = batched_charpoly_mod_p(mats, F.p)[:, 0]
        return const if c % 2 == 0 else F.neg[const]
    out = np.empty(mats.shape[0], dtype=np.int64)
    for i, m in enumerate(mats):
        const = charpoly(F, m)[0]
        out[i] = const if c % 2 == 0 else F.neg[const]
    return out


@lru_cache(maxsize=None)
def flat_group(q: int, c: int) -> FlatGroup:
    ctx = get_group(q, c)
    F = ctx.F
    mats = ctx.enumerate_group().astype(np.int64)
    n = mats.shape[0]
    det_dlog = F.dlog[_batched_det(F, mats)]
    tr = np.zeros(n, dtype=np.int64)
    for j in range(c):
        tr = F.add[tr, mats[:, j, j]]
    weights = q ** np.arange(c * c, dtype=np.int64)
    index_of_code = np.full(q ** (c * c), -1, dtype=np.int64)
    index_of_code[mats.reshape(-1, c * c) @ weights] = np.arange(n)
    inv_idx = np.empty(n, dtype=np.int64)
    for i, m in enumerate(mats):
        inv_idx[i] = index_of_code[int(mat_inv(F, m).reshape(-1) @ weights)]
    if F.e == 1:
        class_idx = ctx.batch_class_indices(mats)
    else:
        class_idx = np.array([ctx.class_index(m) for m in mats],
                             dtype=np.int64)
    return FlatGroup(ctx, mats, det_dlog, tr, inv_idx, class_idx,
                     index_of_code)


# ---------------------------------------------------------------------------
# count tensors
# ---------------------------------------------------------------------------

def _count_tensor(fg: FlatGroup, k: int, h_idx: int) -> np.ndarray:
    """Histogram over all k-tuples multiplying to mats[h_idx], flattened as
    (det-dlog digits of x_1..x_k, base q-1, then total trace, base q)."""
    q = fg.ctx.q
    F = fg.ctx.F
    n = fg.size
    cells = (q - 1) ** k * q
    if n ** (k - 1) > KL_BUDGET:
        raise BudgetError(
            f"Kloosterman enumeration needs |GL_{fg.ctx.n}(F_{q})|^{k - 1} "
            f"= {n ** (k - 1)} free tuples (cap {KL_BUDGET})")
    if cells > KL_TENSOR_BUDGET:
        raise BudgetError(
            f"Kloosterman histogram needs (q-1)^k * q = {cells} cells "
            f"(cap {KL_TENSOR_BUDGET})")
    if k == 1:
        idx = np.array([h_idx], dtype=np.int64)
        return np.bincount(fg.det_dlog[idx] * q + fg.tr[idx],
                           minlength=cells)
    # enumerate (x_1, ..., x_{k-2}) fully, then stream the expansion by
    # x_{k-1} in slices so peak memory stays near _CHUNK * n entries
    prod = np.zeros(1, dtype=np.int64)
    key = np.zeros(1, dtype=np.int64)
    tr_sum = np.zeros(1, dtype=np.int64)
    if k >= 3:
        prod = np.arange(n, dtype=np.int64)
        key = fg.det_dlog.copy()
        tr_sum = fg.tr.copy()
        for _ in range(k - 3):
            m = prod.shape[0]
            left = np.repeat(np.arange(m, dtype=np.int64), n)
            right = np.tile(np.arange(n, dtype=np.int64), m)
            key = key[left] * (q - 1) + fg.det_dlog[right]
            tr_sum = F.add[tr_sum[left], fg.tr[right]]
            prod = fg.products(prod[left], right)
    out = np.zeros(cells, dtype=np.int64)
    step = max(1, _CHUNK // n)
    for lo in range(0, prod.shape[0], step):
        pr = prod[lo:lo + step]
        m = pr.shape[0]
        left = np.repeat(np.arange(m, dtype=np.int64), n)
        right = np.tile(np.arange(n, dtype=np.int64), m)
        if k == 2:
            # prefix is the empty product: x_1 is the streamed factor
            kk = fg.det_dlog[right]
            tt = fg.tr[right]
            pp = right
        else:
            kk = key[lo:lo + step][left] * (q - 1) + fg.det_dlog[right]
            tt = F.add[tr_sum[lo:lo + step][left], fg.tr[right]]
            pp = fg.products(pr[left], right)
        last = fg.products(fg.inv_idx[pp],
                           np.full(pp.shape[0], h_idx, dtype=np.int64))
        kk = kk * (q - 1) + fg.det_dlog[last]
        tt = F.add[tt, fg.tr[last]]
        out += np.bincount(kk * q + tt, minlength=cells)
    return out


@lru_cache(maxsize=None)
def _class_count_tensor(q: int, c: int, k: int, cls: int) -> np.ndarray:
    fg = flat_group(q, c)
    rep_idx = fg.index_of(np.asarray(fg.ctx.classes[cls].rep))
    out = _count_tensor(fg, k, rep_idx)
    out.setflags(write=False)
    return out


def _tensor_sum(q: int, tensor: np.ndarray, alphas: tuple[int, ...],
                t: int) -> ScaledCyclotomic:
    ring = get_ring(q)
    F = get_group(q, 1).F
    psi_vals = [psi_value(ring, F, s, t) for s in range(q)]
    total = ring.zero
    for cell in np.flatnonzero(tensor):
        count = int(tensor[cell])
        s = int(cell) % q
        rest = int(cell) // q
        exp = 0
        for a in reversed(alphas):
            exp += a * (rest % (q - 1))
            rest //= q - 1
        total = total + (ring.root_of_unity(q - 1, exp)
                         * psi_vals[s]).scale(count)
    return total


# ---------------------------------------------------------------------------
# public sums
# ---------------------------------------------------------------------------

def kl_sum(q: int, c: int, alphas: tuple[int, ...], h: np.ndarray,
           t: int = 1) -> ScaledCyclotomic:
    """Kl(alpha, psi_t, h) at a literal matrix h.  Class invariance is
    exploited: the cached tensor of the class of h is evaluated."""
    fg = flat_group(q, c)
    cls = fg.ctx.class_index(np.asarray(h, dtype=np.int64))
    tensor = _class_count_tensor(q, c, len(alphas), cls)
    return _tensor_sum(q, tensor, alphas, t)


def kl_profile(q: int, c: int, alphas: tuple[int, ...],
               t: int = 1) -> tuple[ScaledCyclotomic, ...]:
    """One Kl(alpha, psi_t, -) value per conjugacy class of GL_c(F_q)."""
    nclasses = get_group(q, c).nclasses
    return tuple(_tensor_sum(q, _class_count_tensor(q, c, len(alphas), i),
                             alphas, t)
                 for i in range(nclasses))


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------

def check_bs_kloosterman(q: int, k: int, c: int,
                         exponents: tuple[int, ...],
                         t: int = 1) -> dict:
    """B_tau(h) = q^{-(k-1)c^2} Kl(alpha^{-1}, psi, (-1)^{k-1} h^{-1}) for
    every class h, where tau is the generic constituent of the principal
    series with pairwise distinct exponents alpha.  One case per class."""
    assert len(exponents) == k
    tau = tuple(GL1Datum(a % (q - 1)) for a in exponents)
    profile = special_value_profile(q, tau, c, t)
    ctx = get_group(q, c)
    F = ctx.F
    neg = tuple(-a for a in exponents)
    sign = F.neg[1] if k % 2 == 0 else 1
    factor = Fraction(1, q ** ((k - 1) * c * c))
    cases = []
    ok = True
    for info, bs_val in zip(ctx.classes, profile.values):
        target = F.mul[sign, mat_inv(F, np.asarray(info.rep, dtype=np.int64))]
        rhs = kl_sum(q, c, neg, target, t).scale(factor)
        match = (bs_val - rhs).is_zero()
        ok = ok and match
        cases.append({"name": f"class {info.label}",
                      "status": "pass" if match else "fail",
                      "lhs": bs_val.serialize(), "rhs": rhs.serialize()})
    return {"suite": "bs-kloosterman",
            "params": {"q": q, "k": k, "c": c,
                       "exponents": list(exponents), "t": t},
            "ok": ok, "cases": cases}


def _spectra_disjoint(F: FieldContext, h1: np.ndarray,
                      h2: np.ndarray) -> bool:
    f1 = {f for f, _ in factor_monic(F.q, charpoly(F, h1))}
    f2 = {f for f, _ in factor_monic(F.q, charpoly(F, h2))}
    return not (f1 & f2)


def check_kl_multiplicativity(q: int, k: int, c1: int, c2: int,
                              alphas: tuple[int, ...] | None = None,
                              t: int = 1) -> dict:
    """Both multiplicativity identities over all class pairs (h1, h2).

    The summed identity (factor q^{k c1 c2}, sum over the block-upper
    unipotent radical) holds unconditionally; the direct product formula
    (factor q^{(k-1) c1 c2}) is checked on pairs with disjoint spectra.
    Checks all alpha tuples when alphas is None.
    """
    c = c1 + c2
    ctx = get_group(q, c)
    F = ctx.F
    radical = ctx.unipotent_radical((c1, c2)).astype(np.int64)
    tuples = [alphas] if alphas is not None else _all_alpha_tuples(q, k)
    cases = []
    ok = True
    for alpha in tuples:
        prof = kl_profile(q, c, alpha, t)
        prof1 = kl_profile(q, c1, alpha, t)
        prof2 = kl_profile(q, c2, alpha, t)
        for i1, in1 in enumerate(get_group(q, c1).classes):
            for i2, in2 in enumerate(get_group(q, c2).classes):
                d = block_diag([np.asarray(in1.rep), np.asarray(in2.rep)])
                total = get_ring(q).zero
                for n_mat in radical:
                    total = total + prof[ctx.class_index(mat_mul(F, n_mat, d))]
                rhs = (prof1[i1] * prof2[i2]).scale(
                    Fraction(q ** (k * c1 * c2)))
                match = (total - rhs).is_zero()
                ok = ok and match
                cases.append({
                    "name": (f"summed alpha={list(alpha)} "
                             f"h1={in1.label} h2={in2.label}"),
                    "status": "pass" if match else "fail"})
                if _spectra_disjoint(F, np.asarray(in1.rep),
                                     np.asarray(in2.rep)):
                    lhs2 = prof[ctx.class_index(d)]
                    rhs2 = (prof1[i1] * prof2[i2]).scale(
                        Fraction(q ** ((k - 1) * c1 * c2)))
                    match2 = (lhs2 - rhs2).is_zero()
                    ok = ok and match2
                    cases.append({
                        "name": (f"disjoint alpha={list(alpha)} "
                                 f"h1={in1.label} h2={in2.label}"),
                        "status": "pass" if match2 else "fail"})
    return {"suite": "kl-mult",
            "params": {"q": q, "k": k, "c1": c1, "c2": c2, "t": t,
                       "alphas": None if alphas is None else list(alphas)},
            "ok": ok, "cases": cases}


def _all_alpha_tuples(q: int, k: int) -> list[tuple[int, ...]]:
    out = []
    for code in range((q - 1) ** k):
        tup = []
        rest = code
        for _ in range(k):
            tup.append(rest % (q - 1))
            rest //= q - 1
        out.append(tuple(tup))
    return out
