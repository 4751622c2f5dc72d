"""Conjugacy classes, matrix ops, and enumeration oracles."""
from __future__ import annotations

import random

import numpy as np
import pytest

from glgamma.ffield import make_field
from glgamma.glclasses import (BudgetError, batched_charpoly_mod_p,
                               batched_rank_mod_p, charpoly, class_label,
                               companion, flag_chain_count, gaussian_binomial,
                               get_group, group_order, identity, mat_det,
                               mat_inv, mat_mul, mat_rank, mat_trace,
                               partitions, transpose_inverse)

# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _random_invertible(F, n: int, rng: random.Random) -> np.ndarray:
    while True:
        g = np.array([[rng.randrange(F.q) for _ in range(n)]
                      for _ in range(n)], dtype=np.int64)
        if mat_det(F, g) != 0:
            return g

def _orbit_partition(ctx) -> list[list[int]]:
    """True conjugation orbits by brute force (tiny groups only)."""
    F = ctx.F
    mats = ctx.enumerate_group()
    index = {m.astype(np.int8).tobytes(): i for i, m in enumerate(mats)}
    invs = [mat_inv(F, m) for m in mats]
    seen: set[int] = set()
    orbits = []
    for i in range(len(mats)):
        if i in seen:
            continue
        orb = set()
        for h, hinv in zip(mats, invs):
            x = mat_mul(F, mat_mul(F, h, mats[i]), hinv)
            orb.add(index[x.astype(np.int8).tobytes()])
        seen |= orb
        orbits.append(sorted(orb))
    return orbits

# ---------------------------------------------------------------------------
# matrix operations
# ---------------------------------------------------------------------------

def test_matrix_ops_basics():
    F = make_field(3)
    w = np.array([[0, 1], [1, 0]], dtype=np.int64)
    assert mat_det(F, w) == 2  # -1 mod 3
    g = np.array([[1, 2], [0, 1]], dtype=np.int64)
    gi = mat_inv(F, g)
    assert np.array_equal(mat_mul(F, g, gi), identity(2))
    assert mat_trace(F, g) == 2
    ti = transpose_inverse(F, g)
    assert np.array_equal(ti, mat_inv(F, g).T)
    assert mat_rank(F, np.array([[1, 2], [2, 4 % 3]], dtype=np.int64)) == 1
    with pytest.raises(ValueError):
        mat_inv(F, np.array([[1, 2], [2, 1]], dtype=np.int64))

def test_matrix_ops_extension_field():
    F = make_field(4)
    rng = random.Random(41)
    for _ in range(50):
        a = _random_invertible(F, 3, rng)
        b = _random_invertible(F, 3, rng)
        ab = mat_mul(F, a, b)
        assert mat_det(F, ab) == F.mul[mat_det(F, a), mat_det(F, b)]
        assert np.array_equal(mat_mul(F, mat_inv(F, ab), a),
                              mat_inv(F, b))

def test_charpoly_companion_and_batch_agree():
    for q in (2, 3, 4):
        F = make_field(q)
        for f in ((1, 1, 1), (2 % q, 1, 0, 1) if q == 3 else (1, 0, 1, 1)):
            C = companion(F, f)
            assert charpoly(F, C) == f
    # identity: (x - 1)^n
    F = make_field(3)
    assert charpoly(F, identity(2)) == (1, 1, 1)  # x^2 - 2x + 1 = x^2+x+1
    # batched pipeline agrees with permutation expansion on random input
    rng = random.Random(42)
    for q, n in ((2, 4), (3, 3), (5, 2)):
        F = make_field(q)
        mats = np.array([[[rng.randrange(q) for _ in range(n)]
                          for _ in range(n)] for _ in range(40)],
                        dtype=np.int64)
        got = batched_charpoly_mod_p(mats, q)
        for i in range(40):
            assert tuple(int(c) for c in got[i]) == charpoly(F, mats[i])[:n]

def test_batched_rank_matches_scalar():
    rng = random.Random(43)
    for q in (2, 3, 5):
        F = make_field(q)
        mats = np.array([[[rng.randrange(q) for _ in range(4)]
                          for _ in range(4)] for _ in range(60)],
                        dtype=np.int64)
        # force some singular rows
        mats[::5, 2] = mats[::5, 1]
        got = batched_rank_mod_p(mats, q)
        for i in range(60):
            assert got[i] == mat_rank(F, mats[i])

# ---------------------------------------------------------------------------
# conjugacy classes against brute-force orbits
# ---------------------------------------------------------------------------

def test_gl1_f3_classes():
    ctx = get_group(3, 1)
    assert ctx.nclasses == 2
    assert sorted(c.size for c in ctx.classes) == [1, 1]

def test_gl2_f2_classes():
    ctx = get_group(2, 2)
    assert ctx.order == 6
    assert ctx.nclasses == 3
    assert [c.size for c in ctx.classes] == [1, 3, 2]

def _check_orbits_match(q: int, n: int) -> None:
    ctx = get_group(q, n)
    orbits = _orbit_partition(ctx)
    assert len(orbits) == ctx.nclasses
    mats = ctx.enumerate_group()
    sizes = sorted(len(o) for o in orbits)
    assert sizes == sorted(c.size for c in ctx.classes)
    for orb in orbits:
        labels = {class_label(ctx.F, mats[i]) for i in orb}
        assert len(labels) == 1
        label = labels.pop()
        idx = ctx.label_to_index[label]
        assert ctx.classes[idx].size == len(orb)

def test_orbits_gl2_f2():
    _check_orbits_match(2, 2)

def test_orbits_gl2_f3():
    ctx = get_group(3, 2)
    assert ctx.order == 48
    _check_orbits_match(3, 2)

def test_orbits_gl3_f2():
    _check_orbits_match(2, 3)

def test_orbits_gl2_f4():
    _check_orbits_match(4, 2)

def test_class_sizes_sum_to_group_order():
    for q, n in ((2, 4), (3, 3), (2, 5), (5, 2), (4, 2), (2, 6), (3, 4)):
        ctx = get_group(q, n)
        assert sum(c.size for c in ctx.classes) == group_order(q, n)
        seen = set(c.label for c in ctx.classes)
        assert len(seen) == ctx.nclasses

def test_conjugation_invariance_seeded():
    rng = random.Random(20260817)
    cases = [(3, 2), (2, 3), (3, 3), (2, 4)]
    for trial in range(1000):
        q, n = cases[trial % len(cases)]
        ctx = get_group(q, n)
        g = _random_invertible(ctx.F, n, rng)
        h = _random_invertible(ctx.F, n, rng)
        conj = mat_mul(ctx.F, mat_mul(ctx.F, h, g), mat_inv(ctx.F, h))
        assert class_label(ctx.F, conj) == class_label(ctx.F, g)

def test_batch_class_indices_match_scalar():
    rng = random.Random(44)
    for q, n in ((3, 4), (2, 6), (2, 4)):
        ctx = get_group(q, n)
        mats = np.array([_random_invertible(ctx.F, n, rng)
                         for _ in range(300)], dtype=np.int64)
        got = ctx.batch_class_indices(mats)
        for i in range(300):
            assert got[i] == ctx.class_index(mats[i])
    # representatives land on their own index
    ctx = get_group(3, 4)
    reps = np.stack([c.rep for c in ctx.classes])
    assert np.array_equal(ctx.batch_class_indices(reps),
                          np.arange(ctx.nclasses))

def test_unipotent_jordan_block_size():
    # regular unipotent in GL_2(F_3): centralizer 6, orbit 8
    ctx = get_group(3, 2)
    g = np.array([[1, 1], [0, 1]], dtype=np.int64)
    idx = ctx.class_index(g)
    assert ctx.classes[idx].size == 8

# ---------------------------------------------------------------------------
# subspaces, flags, radicals
# ---------------------------------------------------------------------------

def test_gaussian_binomials():
    assert gaussian_binomial(4, 2, 3) == 130
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(6, 3, 3) == 33880
    assert gaussian_binomial(3, 1, 2) == 7
    assert flag_chain_count(4, (2, 2), 3) == 130
    assert flag_chain_count(3, (1, 1, 1), 2) == 21
    assert flag_chain_count(6, (2, 2, 2), 3) == 11011 * 130

def test_subspace_groups_enumeration():
    ctx = get_group(3, 4)
    groups = ctx.subspace_groups(2)
    total = sum(T.shape[0] for _, T in groups)
    assert total == 130
    seen = set()
    for piv, T in groups:
        for i in range(T.shape[0]):
            m = T[i]
            for c, r in enumerate(piv):
                assert m[r, c] == 1
            assert mat_rank(ctx.F, m) == 2
            seen.add(m.tobytes())
    assert len(seen) == 130

def test_unipotent_radical_enumeration():
    ctx = get_group(3, 2)
    N = ctx.unipotent_radical((1, 1))
    assert N.shape == (3, 2, 2)
    ctx4 = get_group(3, 4)
    N4 = ctx4.unipotent_radical((2, 2))
    assert N4.shape[0] == 81
    assert len({m.tobytes() for m in N4}) == 81
    for m in N4[:10]:
        assert np.array_equal(np.tril(m), np.eye(4, dtype=np.int8))
    ctx3 = get_group(2, 3)
    N3 = ctx3.unipotent_radical((1, 1, 1))
    assert N3.shape[0] == 8

def test_budget_refusals():
    ctx = get_group(3, 4)
    with pytest.raises(BudgetError):
        ctx.enumerate_group()
    ctx6 = get_group(3, 6)
    with pytest.raises(BudgetError):
        ctx6.unipotent_radical((1, 1, 1, 1, 1, 1))

def test_partitions():
    assert partitions(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
    assert partitions(0) == ((),)
    assert len(partitions(6)) == 11

def test_context_determinism():
    a = get_group(3, 3)
    b = get_group(3, 3)
    assert a is b
    fresh = type(a)(3, 3)
    assert [c.label for c in fresh.classes] == [c.label for c in a.classes]
    assert [c.size for c in fresh.classes] == [c.size for c in a.classes]
