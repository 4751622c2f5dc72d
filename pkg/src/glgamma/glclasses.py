"""GL_n(F_q) infrastructure: matrices, conjugacy classes, subspaces.

Conjugacy classes are identified by canonical labels: the sorted multiset
of (monic irreducible f != x, partition lambda_f), where lambda_f is read
off the nullity sequence of powers of f(g).  Class sizes come from the
centralizer product formula (per factor, with Q = q^deg f and lambda'
the conjugate partition:  Q^{sum lambda'_i^2} * prod over multiplicities
m_j of (1-Q^{-1})...(1-Q^{-m_j})), checked at build time against the
group order.

The hot path is `batch_class_indices`: thousands-to-millions of matrices
are labeled at once.  For prime q the characteristic polynomial is
computed by Faddeev-LeVerrier on float64 integer lifts (exact: all
intermediates stay far below 2^53), keyed into a precomputed table of
all monic polynomials of degree n; squarefree keys resolve to a class
immediately, the rest fall into a grouped nullity computation.  Matrix
conventions: numpy arrays of packed field elements, row index first;
vectors are columns; bulk arrays use int8.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product

import numpy as np

from .ffield import (FieldContext, factor_monic, irreducible_monics,
                     make_field, poly_mul)

CLASS_BUDGET = 100_000        # max conjugacy classes per context
ENUM_BUDGET = 2_000_000       # max group elements for brute enumeration
RADICAL_BUDGET = 10_000_000   # max unipotent-radical size
CHAIN_BUDGET = 10_000_000     # max flag chains in induced-character sums


class BudgetError(RuntimeError):
    """Raised with a sizing message when a hard cap would be exceeded."""


# ---------------------------------------------------------------------------
# scalar matrix operations (packed elements, any q)
# ---------------------------------------------------------------------------

def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)

def mat_mul(F: FieldContext, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if F.e == 1:
        return (A.astype(np.int64) @ B.astype(np.int64)) % F.p
    n, m = A.shape
    out = np.zeros((n, B.shape[1]), dtype=np.int64)
    for k in range(m):
        out = F.add[out, F.mul[A[:, k][:, None], B[k, :][None, :]]]
    return out

def mat_vec(F: FieldContext, A: np.ndarray, v: np.ndarray) -> np.ndarray:
    return mat_mul(F, A, v.reshape(-1, 1)).ravel()

def mat_trace(F: FieldContext, A: np.ndarray) -> int:
    t = 0
    for i in range(A.shape[0]):
        t = int(F.add[t, A[i, i]])
    return t

def mat_inv(F: FieldContext, A: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse; ValueError on singular input."""
    n = A.shape[0]
    W = np.concatenate([A.astype(np.int64) % F.q, identity(n)], axis=1)
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, n):
            if W[i, c]:
                piv = i
                break
        if piv is None:
            raise ValueError("singular matrix")
        W[[r, piv]] = W[[piv, r]]
        W[r] = F.mul[W[r], F.inv[W[r, c]]]
        for i in range(n):
            if i != r and W[i, c]:
                W[i] = F.add[W[i], F.mul[F.neg[W[i, c]], W[r]]]
        r += 1
    return W[:, n:]

def mat_det(F: FieldContext, A: np.ndarray) -> int:
    n = A.shape[0]
    W = A.astype(np.int64) % F.q
    W = W.copy()
    det = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if W[i, c]:
                piv = i
                break
        if piv is None:
            return 0
        if piv != c:
            W[[c, piv]] = W[[piv, c]]
            det = int(F.neg[det])
        det = int(F.mul[det, W[c, c]])
        w = F.mul[F.inv[W[c, c]], W[c]]
        for i in range(c + 1, n):
            if W[i, c]:
                W[i] = F.add[W[i], F.mul[F.neg[W[i, c]], w]]
    return det

def mat_rank(F: FieldContext, A: np.ndarray) -> int:
    rows, cols = A.shape
    W = A.astype(np.int64).copy() % F.q
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if W[i, c]:
                piv = i
                break
        if piv is None:
            continue
        W[[r, piv]] = W[[piv, r]]
        W[r] = F.mul[W[r], F.inv[W[r, c]]]
        for i in range(rows):
            if i != r and W[i, c]:
                W[i] = F.add[W[i], F.mul[F.neg[W[i, c]], W[r]]]
        r += 1
        if r == rows:
            break
    return r

def transpose_inverse(F: FieldContext, A: np.ndarray) -> np.ndarray:
    return mat_inv(F, A).T.copy()

def mat_pow(F: FieldContext, A: np.ndarray, k: int) -> np.ndarray:
    out = identity(A.shape[0])
    for _ in range(k):
        out = mat_mul(F, out, A)
    return out

def block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.int64)
    at = 0
    for b in blocks:
        d = b.shape[0]
        out[at:at + d, at:at + d] = b
        at += d
    return out

def companion(F: FieldContext, f: tuple[int, ...]) -> np.ndarray:
    d = len(f) - 1
    C = np.zeros((d, d), dtype=np.int64)
    for i in range(1, d):
        C[i, i - 1] = 1
    for i in range(d):
        C[i, d - 1] = F.neg[f[i]]
    return C

def charpoly(F: FieldContext, A: np.ndarray) -> tuple[int, ...]:
    """Monic characteristic polynomial by signed permutation expansion.

    Slow-but-universal scalar path (n <= 6, any prime power q).
    """
    n = A.shape[0]
    acc = [0] * (n + 1)
    for perm in permutations(range(n)):
        # sign of the permutation
        sign = 1
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            ln = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                ln += 1
            if ln % 2 == 0:
                sign = -sign
        term = (1,)
        for i in range(n):
            # entry of xI - A at (i, perm(i)): linear poly
            c0 = int(F.neg[A[i, perm[i]]])
            lin = (c0, 1) if i == perm[i] else (c0,)
            term = poly_mul(F, term, lin)
        if sign < 0:
            term = tuple(int(F.neg[c]) for c in term)
        for e, c in enumerate(term):
            acc[e] = int(F.add[acc[e], c])
    assert acc[n] == 1
    return tuple(acc)


# ---------------------------------------------------------------------------
# batched kernels (prime q; float64 integer lifts)
# ---------------------------------------------------------------------------

def batched_charpoly_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """(B,n,n) integer matrices -> (B,n) coefficients c_0..c_{n-1} mod p.

    Faddeev-LeVerrier on the integer lifts; every intermediate is an
    exact integer well below 2^53, so float64 BLAS is exact.
    """
    B, n, _ = mats.shape
    A = mats.astype(np.float64)
    coeffs = np.zeros((B, n + 1))
    coeffs[:, n] = 1.0
    M = A.copy()
    for k in range(1, n + 1):
        if k > 1:
            M = A @ (M + coeffs[:, n - k + 1][:, None, None] * np.eye(n))
        t = np.trace(M, axis1=1, axis2=2)
        c = -t / k
        assert np.all(c == np.round(c)), "non-integer trace in charpoly"
        coeffs[:, n - k] = c
    out = np.remainder(coeffs[:, :n].astype(np.int64), p)
    return out

def batched_matmul_mod_p(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    C = A.astype(np.float64) @ B.astype(np.float64)
    return np.remainder(C.astype(np.int64), p)

def batched_rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a (B,r,c) batch over F_p by vectorized elimination."""
    A = np.remainder(mats.astype(np.int64), p)
    B, rows, cols = A.shape
    inv = np.array([pow(x, p - 2, p) if x else 0 for x in range(p)],
                   dtype=np.int64)
    rank = np.zeros(B, dtype=np.int64)
    rpos = np.zeros(B, dtype=np.int64)
    rowidx = np.arange(rows)[None, :]
    for c in range(cols):
        col = A[:, :, c]
        mask = (col != 0) & (rowidx >= rpos[:, None])
        has = mask.any(axis=1)
        sel = np.nonzero(has)[0]
        if len(sel) == 0:
            continue
        piv = mask[sel].argmax(axis=1)
        r0 = rpos[sel]
        tmp = A[sel, r0, :].copy()
        A[sel, r0, :] = A[sel, piv, :]
        A[sel, piv, :] = tmp
        pv = A[sel, r0, c]
        A[sel, r0, :] = (A[sel, r0, :] * inv[pv][:, None]) % p
        fac = A[sel, :, c].copy()
        fac[np.arange(len(sel)), r0] = 0
        A[sel] = (A[sel] - fac[:, :, None] * A[sel, r0, :][:, None, :]) % p
        rpos[sel] += 1
        rank[sel] += 1
    return rank


# ---------------------------------------------------------------------------
# partitions and class labels
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def partitions(n: int, cap: int | None = None) -> tuple[tuple[int, ...], ...]:
    """All partitions of n as decreasing tuples."""
    if n == 0:
        return ((),)
    cap = n if cap is None else min(cap, n)
    out = []
    for first in range(cap, 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)

def conjugate_partition(lam: tuple[int, ...]) -> tuple[int, ...]:
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part > i) for i in range(lam[0]))

def _centralizer_order(q: int, label) -> int:
    total = Fraction(1)
    for f, lam in label:
        Q = q ** (len(f) - 1)
        lam_conj = conjugate_partition(lam)
        c = Fraction(Q) ** sum(x * x for x in lam_conj)
        mults = {}
        for part in lam:
            mults[part] = mults.get(part, 0) + 1
        for m in mults.values():
            for i in range(1, m + 1):
                c *= 1 - Fraction(1, Q ** i)
        total *= c
    assert total.denominator == 1
    return int(total)

def group_order(q: int, n: int) -> int:
    qq = q ** n
    out = 1
    for i in range(n):
        out *= qq - q ** i
    return out

def _label_of_factored(F: FieldContext, g: np.ndarray, factors) -> tuple:
    """Label from a matrix and its factored characteristic polynomial."""
    parts = []
    for f, mult in factors:
        if mult == 1:
            parts.append((f, (1,)))
            continue
        d = len(f) - 1
        fg = _poly_at_matrix(F, f, g)
        nullities = []
        P = identity(g.shape[0])
        prev = 0
        deltas = []
        for i in range(1, mult + 1):
            P = mat_mul(F, P, fg)
            nul = g.shape[0] - mat_rank(F, P)
            delta = (nul - prev) // d
            assert delta * d == nul - prev
            prev = nul
            deltas.append(delta)
            if nul == mult * d:
                break
        lam = conjugate_partition(tuple(deltas))
        assert sum(lam) == mult
        parts.append((f, lam))
    return tuple(sorted(parts, key=lambda fl: (len(fl[0]), fl[0], fl[1])))

def _poly_at_matrix(F: FieldContext, f, g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for c in reversed(f):
        out = mat_mul(F, out, g)
        out = F.add[out, c * identity(n)]
    return out

def class_label(F: FieldContext, g: np.ndarray):
    """Canonical (irreducible, partition) multiset identifying the class."""
    if F.e == 1:
        coeffs = batched_charpoly_mod_p(
            np.asarray(g, dtype=np.int64)[None], F.p)[0]
        cp = tuple(int(c) for c in coeffs) + (1,)
    else:
        cp = charpoly(F, g)
    assert cp[0] != 0, "singular matrix has no conjugacy class here"
    return _label_of_factored(F, g, factor_monic(F.q, cp))


# ---------------------------------------------------------------------------
# group context
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClassInfo:
    label: tuple
    rep: np.ndarray
    size: int

class GroupContext:
    """Conjugacy-class data and enumeration caches for one GL_n(F_q)."""

    def __init__(self, q: int, n: int):
        self.q = q
        self.n = n
        self.F = make_field(q)
        self.order = group_order(q, n)
        self.classes = self._build_classes()
        self.nclasses = len(self.classes)
        self.label_to_index = {c.label: i for i, c in enumerate(self.classes)}
        self._matrix_memo: dict[bytes, int] = {}
        self._subspace_cache: dict[int, list] = {}
        if self.F.e == 1:
            self._build_key_tables()
        total = sum(c.size for c in self.classes)
        assert total == self.order, "class sizes do not sum to |G|"
        for i, c in enumerate(self.classes):
            assert class_label(self.F, c.rep) == c.label, \
                "representative fails label round trip"

    # -- class enumeration ---------------------------------------------------

    def _build_classes(self) -> list[ClassInfo]:
        q, n = self.q, self.n
        # every monic charpoly with nonzero constant term is hit, so the
        # class count is at least q^{n-1}(q-1); refuse before enumerating
        lower = q ** (n - 1) * (q - 1)
        if lower > CLASS_BUDGET:
            raise BudgetError(
                f"GL_{n}(F_{q}) has at least {lower} conjugacy classes, "
                f"over CLASS_BUDGET={CLASS_BUDGET}")
        polys = []
        for d in range(1, n + 1):
            for f in irreducible_monics(q, d):
                if f == (0, 1):
                    continue
                polys.append(f)
        polys.sort(key=lambda f: (len(f), f))
        labels: list[tuple] = []

        def rec(idx: int, weight: int, current: list):
            if weight == 0:
                labels.append(tuple(current))
                if len(labels) > CLASS_BUDGET:
                    raise BudgetError(
                        f"GL_{n}(F_{q}) exceeds {CLASS_BUDGET} classes")
                return
            if idx == len(polys):
                return
            f = polys[idx]
            d = len(f) - 1
            rec(idx + 1, weight, current)
            for size in range(1, weight // d + 1):
                for lam in partitions(size):
                    current.append((f, lam))
                    rec(idx + 1, weight - size * d, current)
                    current.pop()

        rec(0, n, [])
        labels = [tuple(sorted(lab, key=lambda fl: (len(fl[0]), fl[0], fl[1])))
                  for lab in labels]
        labels.sort()
        out = []
        for lab in labels:
            rep = self._representative(lab)
            size = self.order // _centralizer_order(q, lab)
            assert size * _centralizer_order(q, lab) == self.order
            out.append(ClassInfo(lab, rep, size))
        return out

    def _representative(self, label) -> np.ndarray:
        F = self.F
        blocks = []
        for f, lam in label:
            C = companion(F, f)
            d = C.shape[0]
            for part in lam:
                J = np.zeros((d * part, d * part), dtype=np.int64)
                for i in range(part):
                    J[i * d:(i + 1) * d, i * d:(i + 1) * d] = C
                    if i + 1 < part:
                        J[i * d:(i + 1) * d, (i + 1) * d:(i + 2) * d] = \
                            identity(d)
                blocks.append(J)
        g = block_diag(blocks)
        g.setflags(write=False)
        return g

    # -- scalar lookup ---------------------------------------------------------

    def index_of_label(self, label) -> int:
        return self.label_to_index[label]

    def class_index(self, g: np.ndarray) -> int:
        key = (g % self.q).astype(np.int8).tobytes()
        hit = self._matrix_memo.get(key)
        if hit is not None:
            return hit
        idx = self.label_to_index[class_label(self.F, g)]
        self._matrix_memo[key] = idx
        return idx

    def class_of_index(self, i: int) -> ClassInfo:
        return self.classes[i]

    # -- batched lookup (prime q) ---------------------------------------------

    def _build_key_tables(self) -> None:
        p, n = self.q, self.n
        nkeys = p ** n
        key_class = np.full(nkeys, -1, dtype=np.int64)
        key_slow: dict[int, tuple] = {}
        powers = p ** np.arange(n)
        for key in range(nkeys):
            coeffs = tuple((key // p ** i) % p for i in range(n))
            if coeffs[0] == 0:
                continue  # singular characteristic polynomial
            f = coeffs + (1,)
            factors = factor_monic(p, f)
            if all(m == 1 for _, m in factors):
                label = tuple(sorted(((g, (1,)) for g, _ in factors),
                                     key=lambda fl: (len(fl[0]), fl[0],
                                                     fl[1])))
                key_class[key] = self.label_to_index[label]
            else:
                key_slow[key] = factors
        self._key_class = key_class
        self._key_slow = key_slow
        self._key_powers = powers

    def batch_class_indices(self, mats: np.ndarray,
                            chunk: int = 1 << 18) -> np.ndarray:
        """Class index of every matrix in a (B,n,n) batch (prime q)."""
        assert self.F.e == 1, "batched labeling requires prime q"
        B = mats.shape[0]
        out = np.empty(B, dtype=np.int64)
        for lo in range(0, B, chunk):
            part = mats[lo:lo + chunk]
            out[lo:lo + part.shape[0]] = self._batch_chunk(part)
        return out

    def _batch_chunk(self, mats: np.ndarray) -> np.ndarray:
        p, n = self.q, self.n
        coeffs = batched_charpoly_mod_p(mats, p)
        keys = coeffs @ self._key_powers
        idx = self._key_class[keys]
        out = idx.copy()
        slow = np.nonzero(idx < 0)[0]
        if len(slow) == 0:
            return out
        slow_keys = keys[slow]
        for key in np.unique(slow_keys):
            sel = slow[slow_keys == key]
            out[sel] = self._slow_group(key, mats[sel])
        return out

    def _slow_group(self, key: int, mats: np.ndarray) -> np.ndarray:
        """Labels for a batch sharing one non-squarefree charpoly."""
        p, n = self.q, self.n
        factors = self._key_slow[int(key)]
        B = mats.shape[0]
        lam_seqs: list[list] = [[] for _ in range(B)]
        for f, mult in factors:
            if mult == 1:
                for i in range(B):
                    lam_seqs[i].append((f, (1,)))
                continue
            d = len(f) - 1
            fg = _batched_poly_at(mats, f, p)
            P = fg
            prev = np.zeros(B, dtype=np.int64)
            deltas = np.zeros((B, mult), dtype=np.int64)
            for i in range(mult):
                nul = n - batched_rank_mod_p(P, p)
                deltas[:, i] = (nul - prev) // d
                assert np.all(deltas[:, i] * d == nul - prev)
                prev = nul
                if np.all(nul == mult * d):
                    break
                P = batched_matmul_mod_p(P, fg, p)
            for b in range(B):
                seq = tuple(x for x in deltas[b] if x > 0)
                lam = conjugate_partition(seq)
                assert sum(lam) == mult
                lam_seqs[b].append((f, lam))
        out = np.empty(B, dtype=np.int64)
        for b in range(B):
            label = tuple(sorted(lam_seqs[b],
                                 key=lambda fl: (len(fl[0]), fl[0], fl[1])))
            out[b] = self.label_to_index[label]
        return out

    # -- enumeration helpers ----------------------------------------------------

    def subspace_groups(self, d: int) -> list:
        """Column-echelon bases of d-dim subspaces, grouped by pivot rows.

        Returns [(piv, T)] with T of shape (m, n, d), T[i][piv,:] = I_d.
        """
        hit = self._subspace_cache.get(d)
        if hit is not None:
            return hit
        q, n = self.q, self.n
        groups = []
        for piv in combinations(range(n), d):
            free = [(r, c) for c in range(d) for r in range(n)
                    if r > piv[c] and r not in piv]
            base = np.zeros((n, d), dtype=np.int64)
            for c in range(d):
                base[piv[c], c] = 1
            count = q ** len(free)
            T = np.tile(base, (count, 1, 1))
            for k, (r, c) in enumerate(free):
                T[:, r, c] = (np.arange(count) // q ** k) % q
            groups.append((piv, T))
        self._subspace_cache[d] = groups
        return groups

    def subspace_count(self, d: int) -> int:
        return gaussian_binomial(self.n, d, self.q)

    def unipotent_radical(self, composition: tuple[int, ...]) -> np.ndarray:
        """All of N_composition as an (size, n, n) int8 array, lex order."""
        assert sum(composition) == self.n
        q, n = self.q, self.n
        starts = np.cumsum((0,) + composition)
        free = []
        for bi in range(len(composition)):
            for bj in range(bi + 1, len(composition)):
                for r in range(starts[bi], starts[bi + 1]):
                    for c in range(starts[bj], starts[bj + 1]):
                        free.append((r, c))
        size = q ** len(free)
        if size > RADICAL_BUDGET:
            raise BudgetError(
                f"unipotent radical of shape {composition} over F_{q} has "
                f"{size} elements (cap {RADICAL_BUDGET})")
        out = np.tile(np.eye(n, dtype=np.int8), (size, 1, 1))
        idx = np.arange(size)
        for k, (r, c) in enumerate(free):
            out[:, r, c] = ((idx // q ** k) % q).astype(np.int8)
        return out

    def enumerate_group(self) -> np.ndarray:
        """Every invertible matrix (tiny oracle use only)."""
        q, n = self.q, self.n
        if q ** (n * n) > ENUM_BUDGET:
            raise BudgetError(
                f"enumerating {q}^{n * n} matrices exceeds {ENUM_BUDGET}")
        total = q ** (n * n)
        mats = np.zeros((total, n, n), dtype=np.int64)
        idx = np.arange(total)
        k = 0
        for r in range(n):
            for c in range(n):
                mats[:, r, c] = (idx // q ** k) % q
                k += 1
        keep = [i for i in range(total)
                if mat_det(self.F, mats[i]) != 0]
        return mats[keep]

@lru_cache(maxsize=None)
def get_group(q: int, n: int) -> GroupContext:
    return GroupContext(q, n)

@lru_cache(maxsize=None)
def gaussian_binomial(n: int, d: int, q: int) -> int:
    num = 1
    den = 1
    for i in range(d):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den

def flag_chain_count(n: int, composition: tuple[int, ...], q: int) -> int:
    total = 1
    rest = n
    for part in composition:
        total *= gaussian_binomial(rest, part, q)
        rest -= part
    assert rest == 0
    return total

def _batched_poly_at(mats: np.ndarray, f, p: int) -> np.ndarray:
    B, n, _ = mats.shape
    out = np.zeros((B, n, n), dtype=np.int64)
    eye = np.eye(n, dtype=np.int64)
    for c in reversed(f):
        out = batched_matmul_mod_p(out, mats, p)
        out = (out + c * eye) % p
    return out
