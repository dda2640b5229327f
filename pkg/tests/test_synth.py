"""Tests for synthetic low-rank instance generation."""

import numpy as np
import pytest

from nmfc.masking import gather
from nmfc.synth import gen_ldr, make_problem, sample_mask


def test_gen_ldr_shapes_and_construction():
    prob = gen_ldr(12, 9, 4, seed=0)
    assert prob.M.shape == (12, 9)
    assert prob.L.shape == (12, 4)
    assert prob.D.shape == (4, 4)
    assert prob.R.shape == (4, 9)
    np.testing.assert_array_equal(np.diag(prob.D), [1.0, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(prob.M, prob.L @ prob.D @ prob.R, rtol=1e-12, atol=0.0)


def test_gen_ldr_rank():
    # oracle: singular values of M, exactly r of them away from zero
    prob = gen_ldr(30, 25, 6, seed=1)
    s = np.linalg.svd(prob.M, compute_uv=False)
    assert s[5] > 1e-8 * s[0]
    assert s[6] < 1e-10 * s[0]


def test_gen_ldr_conditioning_grows_with_r():
    # D = diag(1..r) spreads the spectrum; condition number must reflect it
    prob = gen_ldr(40, 40, 8, seed=2)
    s = np.linalg.svd(prob.M, compute_uv=False)
    assert s[0] / s[7] >= 2.0


def test_gen_ldr_nonnegative():
    prob = gen_ldr(15, 15, 3, seed=3)
    assert prob.M.min() >= 0.0
    assert prob.L.min() >= 0.0
    assert prob.R.min() >= 0.0


def test_gen_ldr_deterministic():
    a = gen_ldr(10, 8, 2, seed=42)
    b = gen_ldr(10, 8, 2, seed=42)
    np.testing.assert_array_equal(a.M, b.M)
    c = gen_ldr(10, 8, 2, seed=43)
    assert not np.array_equal(a.M, c.M)


def test_gen_ldr_rank_bounds():
    with pytest.raises(ValueError):
        gen_ldr(5, 5, 0, seed=0)
    with pytest.raises(ValueError):
        gen_ldr(5, 5, 6, seed=0)


def test_sample_mask_count_is_rounded():
    m, n = 10, 10
    for sr, want in [(0.5, 50), (0.333, 33), (0.007, 1), (1.0, 100)]:
        mask = sample_mask(m, n, sr, seed=0)
        assert mask.count == want, sr


def test_sample_mask_full_rate_row_major():
    mask = sample_mask(3, 4, 1.0, seed=9)
    assert mask.count == 12
    np.testing.assert_array_equal(mask.ii, np.repeat(np.arange(3), 4))
    np.testing.assert_array_equal(mask.jj, np.tile(np.arange(4), 3))


def test_sample_mask_no_duplicates_and_in_bounds():
    mask = sample_mask(17, 13, 0.43, seed=5)
    flat = mask.ii * 13 + mask.jj
    assert len(np.unique(flat)) == mask.count
    assert mask.ii.min() >= 0 and mask.ii.max() < 17
    assert mask.jj.min() >= 0 and mask.jj.max() < 13


def test_sample_mask_deterministic():
    a = sample_mask(20, 20, 0.3, seed=1)
    b = sample_mask(20, 20, 0.3, seed=1)
    assert a == b
    assert a != sample_mask(20, 20, 0.3, seed=2)


def test_sample_mask_rate_bounds():
    with pytest.raises(ValueError):
        sample_mask(5, 5, 0.0, seed=0)
    with pytest.raises(ValueError):
        sample_mask(5, 5, 1.5, seed=0)


def test_make_problem_values_match_truth():
    observed, prob = make_problem(15, 12, 3, 0.6, seed=7)
    assert observed.shape == (15, 12)
    assert observed.mask.count == round(0.6 * 15 * 12)
    np.testing.assert_array_equal(observed.values, gather(prob.M, observed.mask))


def test_make_problem_deterministic():
    obs_a, _ = make_problem(10, 10, 2, 0.5, seed=3)
    obs_b, _ = make_problem(10, 10, 2, 0.5, seed=3)
    assert obs_a.mask == obs_b.mask
    np.testing.assert_array_equal(obs_a.values, obs_b.values)


def test_make_problem_truth_and_mask_streams_independent():
    # same seed, different sr: the truth matrix must not change
    _, prob_a = make_problem(10, 10, 2, 0.3, seed=11)
    _, prob_b = make_problem(10, 10, 2, 0.9, seed=11)
    np.testing.assert_array_equal(prob_a.M, prob_b.M)
