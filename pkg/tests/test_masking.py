"""Tests for mask containers and entrywise projections."""

import numpy as np
import pytest

from nmfc.masking import (
    ObservedMatrix,
    SampleMask,
    embed,
    frob_norm,
    gather,
    masked_product,
    overwrite_observed,
    project_mask,
    project_mask_complement,
    project_nonneg,
)


def _random_mask(rng, m, n, count):
    flat = rng.choice(m * n, size=count, replace=False)
    pairs = [divmod(int(t), n) for t in flat]
    return SampleMask.from_pairs(m, n, pairs)


# ---------------------------------------------------------------- frob_norm

def test_frob_norm_345():
    assert frob_norm([[3.0, 4.0]]) == 5.0


def test_frob_norm_zero():
    assert frob_norm(np.zeros((4, 7))) == 0.0


def test_frob_norm_identity():
    assert frob_norm(np.eye(2)) == pytest.approx(np.sqrt(2.0), rel=1e-15)


# ---------------------------------------------------------------- mask container

def test_mask_sorts_to_row_major():
    mask = SampleMask.from_pairs(3, 3, [(2, 1), (0, 2), (0, 0), (1, 1)])
    assert mask.entries.tolist() == [[0, 0], [0, 2], [1, 1], [2, 1]]


def test_mask_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        SampleMask.from_pairs(2, 2, [(0, 0), (1, 1), (0, 0)])


def test_mask_rejects_out_of_bounds():
    with pytest.raises(ValueError):
        SampleMask.from_pairs(2, 2, [(0, 0), (2, 0)])
    with pytest.raises(ValueError):
        SampleMask.from_pairs(2, 2, [(0, -1)])


def test_mask_full_and_empty():
    full = SampleMask.full(3, 4)
    assert full.count == 12
    assert full.sample_rate == 1.0
    empty = SampleMask.empty(3, 4)
    assert empty.count == 0
    assert empty.sample_rate == 0.0
    # full mask enumerates in row-major order
    assert full.entries[:5].tolist() == [[0, 0], [0, 1], [0, 2], [0, 3], [1, 0]]


def test_mask_from_dense_roundtrip():
    rng = np.random.default_rng(7)
    keep = rng.random((6, 5)) < 0.4
    mask = SampleMask.from_dense(keep)
    np.testing.assert_array_equal(mask.dense_bool(), keep)


def test_mask_arrays_are_read_only():
    mask = SampleMask.from_pairs(2, 2, [(0, 1)])
    with pytest.raises(ValueError):
        mask.ii[0] = 1


def test_mask_equality():
    a = SampleMask.from_pairs(2, 3, [(1, 2), (0, 0)])
    b = SampleMask.from_pairs(2, 3, [(0, 0), (1, 2)])
    c = SampleMask.from_pairs(2, 3, [(0, 0), (1, 1)])
    assert a == b
    assert a != c
    assert a != SampleMask.from_pairs(3, 3, [(0, 0), (1, 2)])


# ---------------------------------------------------------------- projections

def test_project_mask_small_example():
    mask = SampleMask.from_pairs(2, 3, [(0, 0), (1, 2)])
    a = np.arange(6, dtype=float).reshape(2, 3) + 1.0
    expect = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 6.0]])
    np.testing.assert_array_equal(project_mask(a, mask), expect)


def test_mask_complement_partition_bitexact():
    # entries are copied, never recomputed, so the partition is exact
    rng = np.random.default_rng(0)
    for _ in range(20):
        m, n = rng.integers(1, 12, size=2)
        count = int(rng.integers(0, m * n + 1))
        mask = _random_mask(rng, int(m), int(n), count)
        a = rng.standard_normal((int(m), int(n)))
        both = project_mask(a, mask) + project_mask_complement(a, mask)
        np.testing.assert_array_equal(both, a)


def test_project_mask_idempotent_and_linear():
    rng = np.random.default_rng(1)
    mask = _random_mask(rng, 8, 9, 30)
    a = rng.standard_normal((8, 9))
    b = rng.standard_normal((8, 9))
    pa = project_mask(a, mask)
    np.testing.assert_array_equal(project_mask(pa, mask), pa)
    lhs = project_mask(2.5 * a - 0.75 * b, mask)
    rhs = 2.5 * project_mask(a, mask) - 0.75 * project_mask(b, mask)
    np.testing.assert_allclose(lhs, rhs, rtol=0.0, atol=1e-15)


def test_project_nonneg_examples():
    a = np.array([[-1.0, 0.0], [2.5, -0.0]])
    out = project_nonneg(a)
    np.testing.assert_array_equal(out, [[0.0, 0.0], [2.5, 0.0]])
    assert a[0, 0] == -1.0  # input untouched


def test_project_nonneg_idempotent_nonexpansive():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a = rng.standard_normal((6, 4))
        b = rng.standard_normal((6, 4))
        pa = project_nonneg(a)
        np.testing.assert_array_equal(project_nonneg(pa), pa)
        assert frob_norm(pa - project_nonneg(b)) <= frob_norm(a - b) + 1e-15


def test_shape_mismatch_raises():
    mask = SampleMask.from_pairs(2, 3, [(0, 0)])
    with pytest.raises(ValueError):
        project_mask(np.zeros((3, 2)), mask)


# ---------------------------------------------------------------- gather/embed

def test_gather_embed_roundtrip():
    rng = np.random.default_rng(3)
    mask = _random_mask(rng, 7, 5, 12)
    a = rng.random((7, 5))
    vals = gather(a, mask)
    np.testing.assert_array_equal(embed(vals, mask), project_mask(a, mask))
    np.testing.assert_array_equal(gather(embed(vals, mask), mask), vals)


def test_gather_order_matches_mask():
    mask = SampleMask.from_pairs(2, 2, [(1, 0), (0, 1)])
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    # canonical order is (0,1), (1,0)
    np.testing.assert_array_equal(gather(a, mask), [2.0, 3.0])


def test_masked_product_matches_dense():
    rng = np.random.default_rng(4)
    for _ in range(20):
        m, n, q = rng.integers(1, 10, size=3)
        mask = _random_mask(rng, int(m), int(n), int(rng.integers(1, m * n + 1)))
        x = rng.standard_normal((int(m), int(q)))
        y = rng.standard_normal((int(q), int(n)))
        np.testing.assert_allclose(
            masked_product(x, y, mask), gather(x @ y, mask), rtol=1e-12, atol=1e-14
        )


def test_masked_product_empty_mask():
    mask = SampleMask.empty(3, 3)
    out = masked_product(np.ones((3, 2)), np.ones((2, 3)), mask)
    assert out.shape == (0,)


# ---------------------------------------------------------------- ObservedMatrix

def test_observed_matrix_basic():
    mask = SampleMask.from_pairs(2, 2, [(0, 0), (1, 1)])
    obs = ObservedMatrix(mask, [3.0, 4.0])
    assert obs.shape == (2, 2)
    assert obs.sample_rate == 0.5
    assert obs.norm == 5.0
    np.testing.assert_array_equal(obs.to_dense(), [[3.0, 0.0], [0.0, 4.0]])


def test_observed_matrix_length_mismatch():
    mask = SampleMask.from_pairs(2, 2, [(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        ObservedMatrix(mask, [1.0])


def test_observed_matrix_rejects_nonfinite():
    mask = SampleMask.from_pairs(2, 2, [(0, 0)])
    with pytest.raises(ValueError):
        ObservedMatrix(mask, [np.nan])
    with pytest.raises(ValueError):
        ObservedMatrix(mask, [np.inf])


def test_observed_matrix_warns_on_negative():
    mask = SampleMask.from_pairs(2, 2, [(0, 0), (0, 1)])
    with pytest.warns(UserWarning, match="negative"):
        ObservedMatrix(mask, [1.0, -2.0])


def test_observed_matrix_scaled():
    mask = SampleMask.from_pairs(1, 2, [(0, 0), (0, 1)])
    obs = ObservedMatrix(mask, [3.0, 4.0])
    half = obs.scaled(0.5)
    np.testing.assert_array_equal(half.values, [1.5, 2.0])
    assert half.mask == obs.mask
    assert obs.norm == 5.0  # original untouched


def test_overwrite_observed_copies_verbatim():
    rng = np.random.default_rng(5)
    mask = _random_mask(rng, 6, 6, 14)
    obs = ObservedMatrix(mask, rng.random(14))
    a = rng.standard_normal((6, 6))
    out = overwrite_observed(a, obs)
    np.testing.assert_array_equal(gather(out, mask), obs.values)
    np.testing.assert_array_equal(
        project_mask_complement(out, mask), project_mask_complement(a, mask)
    )
