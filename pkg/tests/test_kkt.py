"""Tests for the first-order optimality residual report."""

import numpy as np
import pytest

from nmfc.admm import default_params, solve
from nmfc.kkt import KktReport, kkt_residuals
from nmfc.masking import ObservedMatrix, SampleMask, gather
from nmfc.synth import make_problem


def _exact_point(rng, m, n, q, keep_rate=0.6):
    """A hand-built KKT point: exact factorization, zero multipliers."""
    x = rng.random((m, q))
    y = rng.random((q, n))
    full = x @ y
    mask = SampleMask.from_dense(rng.random((m, n)) < keep_rate)
    obs = ObservedMatrix(mask, gather(full, mask))
    blocks = dict(X=x, Y=y, Z=full, U=x.copy(), V=y.copy(),
                  Lam=np.zeros((m, q)), Pi=np.zeros((q, n)))
    return blocks, obs


def test_exact_point_has_zero_residuals():
    rng = np.random.default_rng(0)
    blocks, obs = _exact_point(rng, 7, 6, 2)
    rep = kkt_residuals(blocks["X"], blocks["Y"], blocks["Z"], blocks["U"],
                        blocks["V"], blocks["Lam"], blocks["Pi"], obs)
    for name, value in rep.raw().items():
        assert value == 0.0, name
    assert rep.max_scaled() == 0.0


def test_scale_denominator():
    rng = np.random.default_rng(1)
    blocks, obs = _exact_point(rng, 5, 5, 2)
    rep = kkt_residuals(blocks["X"], blocks["Y"], blocks["Z"], blocks["U"],
                        blocks["V"], blocks["Lam"], blocks["Pi"], obs)
    assert rep.scale_denominator == 1.0 + np.linalg.norm(obs.values)


def test_sign_violation_is_isolated():
    # a single positive multiplier entry shows up in exactly one residual
    rng = np.random.default_rng(2)
    blocks, obs = _exact_point(rng, 6, 5, 2)
    blocks["Lam"] = blocks["Lam"].copy()
    blocks["Lam"][2, 1] = 0.7
    rep = kkt_residuals(blocks["X"], blocks["Y"], blocks["Z"], blocks["U"],
                        blocks["V"], blocks["Lam"], blocks["Pi"], obs)
    assert rep.r_sign_lambda == pytest.approx(0.7, rel=1e-15)
    assert rep.r_comp_mask == 0.0
    assert rep.r_feas_mask == 0.0
    # the stationarity residual for X picks up the same entry
    assert rep.r_stat_x == pytest.approx(0.7, rel=1e-15)
    # complementarity too, since U > 0 there
    assert rep.r_comp_lambda_u == pytest.approx(0.7 * blocks["U"][2, 1], rel=1e-12)


def test_feasibility_residuals():
    rng = np.random.default_rng(3)
    blocks, obs = _exact_point(rng, 6, 6, 2)
    z = blocks["Z"].copy()
    ii, jj = obs.mask.ii[0], obs.mask.jj[0]
    z[ii, jj] += 0.25
    rep = kkt_residuals(blocks["X"], blocks["Y"], z, blocks["U"], blocks["V"],
                        blocks["Lam"], blocks["Pi"], obs)
    assert rep.r_feas_mask == pytest.approx(0.25, rel=1e-12)


def test_row_permutation_invariance():
    # relabeling rows consistently cannot change any residual norm
    rng = np.random.default_rng(4)
    blocks, obs = _exact_point(rng, 8, 7, 3)
    blocks["Lam"] = rng.standard_normal(blocks["Lam"].shape)
    blocks["U"] = rng.random(blocks["U"].shape)
    base = kkt_residuals(blocks["X"], blocks["Y"], blocks["Z"], blocks["U"],
                         blocks["V"], blocks["Lam"], blocks["Pi"], obs)
    perm = rng.permutation(8)
    pairs = list(zip(np.argsort(perm)[obs.mask.ii], obs.mask.jj))
    mask_p = SampleMask.from_pairs(8, 7, pairs)
    dense = np.zeros((8, 7))
    dense[obs.mask.ii, obs.mask.jj] = obs.values
    obs_p = ObservedMatrix(mask_p, gather(dense[perm], mask_p))
    moved = kkt_residuals(blocks["X"][perm], blocks["Y"], blocks["Z"][perm],
                          blocks["U"][perm], blocks["V"], blocks["Lam"][perm],
                          blocks["Pi"], obs_p)
    for name in KktReport.RAW_FIELDS:
        assert getattr(moved, name) == pytest.approx(getattr(base, name),
                                                     rel=1e-12, abs=1e-14)


def test_shape_validation_names_block():
    rng = np.random.default_rng(5)
    blocks, obs = _exact_point(rng, 5, 4, 2)
    with pytest.raises(ValueError, match="U"):
        kkt_residuals(blocks["X"], blocks["Y"], blocks["Z"],
                      np.zeros((4, 2)), blocks["V"], blocks["Lam"],
                      blocks["Pi"], obs)
    with pytest.raises(ValueError, match="Pi"):
        kkt_residuals(blocks["X"], blocks["Y"], blocks["Z"], blocks["U"],
                      blocks["V"], blocks["Lam"], np.zeros((3, 4)), obs)


def test_as_dict_layout():
    rng = np.random.default_rng(6)
    blocks, obs = _exact_point(rng, 4, 4, 1)
    rep = kkt_residuals(blocks["X"], blocks["Y"], blocks["Z"], blocks["U"],
                        blocks["V"], blocks["Lam"], blocks["Pi"], obs)
    d = rep.as_dict()
    for name in KktReport.RAW_FIELDS:
        assert name in d
        assert "scaled_" + name in d
    assert "scale_denominator" in d
    assert len(d) == 2 * len(KktReport.RAW_FIELDS) + 1


def test_converged_solver_state_passes_check():
    # unit-sized version of the convergence-implies-KKT property
    observed, _ = make_problem(30, 30, 3, 0.7, seed=0)
    p = default_params(observed, 3, seed=0, tol=1e-9, maxiter=10000)
    sol = solve(observed, p)
    assert sol.stop_reason == "rel-change"
    st = sol.state
    rep = kkt_residuals(st.X, st.Y, st.Z, st.U, st.V, st.Lam, st.Pi,
                        observed.scaled(sol.scale))
    assert rep.max_scaled() <= 1e-4
