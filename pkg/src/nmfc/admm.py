"""Alternating-direction augmented-Lagrangian solver for nonnegative
factorization of a partially observed matrix.

Given observed entries A of a nonnegative matrix and an inner dimension
q, the solver looks for X (m x q) and Y (q x n) minimizing
``0.5 * ||P(XY) - A||_F^2`` subject to X >= 0 and Y >= 0, where P keeps
the observed entries.  The problem is split as

    minimize   0.5 * ||X Y - Z||_F^2
    subject to X = U,  Y = V,  U >= 0,  V >= 0,
               Z equals the data on the observed mask,

and each sweep minimizes the augmented Lagrangian over X, Y, Z, U, V in
turn (every block has a closed-form minimizer) before a relaxed gradient
ascent step on the multipliers (Lam, Pi) attached to X = U and Y = V.
The X and Y subproblems are q x q symmetric positive definite systems
solved by a Cholesky factorization that is reused for all right-hand
sides; no explicit inverse is ever formed.

Input data is rescaled to a fixed Frobenius norm before iterating and
the X factor is scaled back on output; the relative residual driving the
stopping rule is invariant under that rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .masking import (
    ObservedMatrix,
    frob_norm,
    masked_product,
    overwrite_observed,
    project_nonneg,
)

__all__ = [
    "GAMMA_LIMIT",
    "SolverParams",
    "SolverState",
    "Solution",
    "default_params",
    "init_state",
    "update_x",
    "update_y",
    "update_z",
    "update_uv",
    "update_multipliers",
    "relative_residual",
    "stopping_met",
    "step",
    "solve",
    "export_blocks",
]

# Relaxed multiplier steps are convergent for step lengths strictly below
# (1 + sqrt(5)) / 2; allow a hair of rounding slack above the literal 1.618.
GAMMA_LIMIT = 1.618
_GAMMA_SLACK = 1e-12


@dataclass
class SolverParams:
    """Penalty, step, and stopping parameters for one solve.

    alpha and beta are the augmented-Lagrangian penalties on X = U and
    Y = V; they apply to the rescaled problem whose data has Frobenius
    norm ``scale_target``.  gamma is the multiplier step length and must
    stay strictly inside (0, 1.618).
    """

    q: int
    alpha: float
    beta: float
    gamma: float = GAMMA_LIMIT - _GAMMA_SLACK
    tol: float = 1e-5
    maxiter: int = 2000
    scale_target: float = 2.5e5
    seed: int = 0

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"inner dimension q must be >= 1, got {self.q}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError(f"penalties must be positive, got alpha={self.alpha}, beta={self.beta}")
        if self.gamma <= 0 or self.gamma >= GAMMA_LIMIT * (1 + _GAMMA_SLACK):
            raise ValueError(f"multiplier step gamma must lie in (0, {GAMMA_LIMIT}), got {self.gamma}")
        if self.tol <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        if self.maxiter < 1:
            raise ValueError(f"maxiter must be >= 1, got {self.maxiter}")
        if self.scale_target <= 0:
            raise ValueError(f"scale target must be positive, got {self.scale_target}")


@dataclass
class SolverState:
    """One full iterate: factor blocks, splitting copies, multipliers.

    ``f_history`` carries the relative residuals observed so far (the
    driver trims it to the last two unless a trace was requested).  States
    are plain values; ``step`` never mutates its input.
    """

    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    U: np.ndarray
    V: np.ndarray
    Lam: np.ndarray
    Pi: np.ndarray
    k: int = 0
    f_history: list = field(default_factory=list)


@dataclass
class Solution:
    """Factors in the original data scale plus run diagnostics.

    ``state`` is the final internal iterate (in the rescaled coordinates)
    and ``scale`` the factor the data was multiplied by; together they
    let callers audit optimality conditions after the fact.
    """

    X: np.ndarray
    Y: np.ndarray
    iterations: int
    final_f: float
    stop_reason: str
    clamp_magnitude: float = 0.0
    scale: float = 1.0
    state: SolverState | None = None
    f_trace: list | None = None
    multiplier_trace: list | None = None

    def product(self) -> np.ndarray:
        return self.X @ self.Y


def default_params(observed: ObservedMatrix, q: int, *, seed: int = 0,
                   tol: float = 1e-5, maxiter: int = 2000) -> SolverParams:
    """Parameter heuristics that work across problem sizes.

    The data is rescaled so its Frobenius norm is 2.5e5, the X-side
    penalty is 2e-4 times that norm times max(m, n) / q, and the Y-side
    penalty rebalances by the aspect ratio n / m.
    """
    if q < 1:
        raise ValueError(f"inner dimension q must be >= 1, got {q}")
    if observed.norm == 0:
        raise ValueError("empty observation: observed entries have zero norm")
    m, n = observed.shape
    scale_target = 2.5e5
    alpha = 2.0e-4 * scale_target * max(m, n) / q
    beta = n * alpha / m
    return SolverParams(q=q, alpha=alpha, beta=beta, tol=tol, maxiter=maxiter,
                        scale_target=scale_target, seed=seed)


def init_state(observed: ObservedMatrix, params: SolverParams) -> SolverState:
    """Starting iterate: random nonnegative Y, Z equal to the embedded data.

    Y is drawn uniformly on [0, 1) from numpy's default PCG64 generator
    seeded with ``params.seed``.  X is a zero placeholder; the first sweep
    overwrites it before it is ever read.
    """
    m, n = observed.shape
    q = params.q
    rng = np.random.default_rng(params.seed)
    return SolverState(
        X=np.zeros((m, q)),
        Y=rng.random((q, n)),
        Z=observed.to_dense(),
        U=np.zeros((m, q)),
        V=np.zeros((q, n)),
        Lam=np.zeros((m, q)),
        Pi=np.zeros((q, n)),
    )


def update_x(state: SolverState, params: SolverParams) -> np.ndarray:
    """Minimize the augmented Lagrangian over X.

    Solves X (Y Y' + alpha I) = Z Y' + alpha U - Lam; the q x q system is
    positive definite for any alpha > 0.
    """
    q = state.Y.shape[0]
    g = state.Y @ state.Y.T
    g[np.diag_indices(q)] += params.alpha
    b = state.Z @ state.Y.T + params.alpha * state.U - state.Lam
    return cho_solve(cho_factor(g), b.T).T


def update_y(state: SolverState, params: SolverParams) -> np.ndarray:
    """Minimize the augmented Lagrangian over Y.

    Solves (X'X + beta I) Y = X'Z + beta V - Pi with the current X.
    """
    q = state.X.shape[1]
    g = state.X.T @ state.X
    g[np.diag_indices(q)] += params.beta
    b = state.X.T @ state.Z + params.beta * state.V - state.Pi
    return cho_solve(cho_factor(g), b)


def update_z(state: SolverState, observed: ObservedMatrix) -> np.ndarray:
    """Best Z agreeing with the data on the mask: the product off it,
    the observed values (copied verbatim) on it."""
    return overwrite_observed(state.X @ state.Y, observed)


def update_uv(state: SolverState, params: SolverParams) -> tuple[np.ndarray, np.ndarray]:
    """Project the multiplier-shifted factors onto the nonnegative orthant."""
    u = project_nonneg(state.X + state.Lam / params.alpha)
    v = project_nonneg(state.Y + state.Pi / params.beta)
    return u, v


def update_multipliers(state: SolverState, params: SolverParams) -> tuple[np.ndarray, np.ndarray]:
    """Relaxed ascent step on the splitting constraints."""
    lam = state.Lam + params.gamma * params.alpha * (state.X - state.U)
    pi = state.Pi + params.gamma * params.beta * (state.Y - state.V)
    return lam, pi


def relative_residual(state: SolverState, observed: ObservedMatrix) -> float:
    """Misfit of the current product on the observed entries, relative to
    the data norm."""
    na = observed.norm
    if na == 0:
        raise ValueError("empty observation: observed entries have zero norm")
    fit = masked_product(state.X, state.Y, observed.mask)
    return float(np.linalg.norm(fit - observed.values) / na)


def stopping_met(f_history, tol: float) -> str | None:
    """Check the two stopping rules, absolute residual first.

    Returns "abs-residual" when the latest residual is at most tol,
    "rel-change" when the drop from the previous residual is at most tol
    relative to max(1, previous), and None otherwise.
    """
    if not f_history:
        return None
    f_new = f_history[-1]
    if f_new <= tol:
        return "abs-residual"
    if len(f_history) >= 2:
        f_prev = f_history[-2]
        if abs(f_new - f_prev) / max(1.0, abs(f_prev)) <= tol:
            return "rel-change"
    return None


def step(state: SolverState, observed: ObservedMatrix, params: SolverParams) -> SolverState:
    """One full sweep: X, Y, Z, U, V updates then the multiplier step.

    The returned state has the new relative residual appended to its
    history; the input state is left untouched.
    """
    cur = replace(state, X=update_x(state, params))
    cur = replace(cur, Y=update_y(cur, params))
    cur = replace(cur, Z=update_z(cur, observed))
    u, v = update_uv(cur, params)
    cur = replace(cur, U=u, V=v)
    lam, pi = update_multipliers(cur, params)
    f = relative_residual(cur, observed)
    return replace(cur, Lam=lam, Pi=pi, k=state.k + 1,
                   f_history=state.f_history + [f])


def _clamp_tiny_negatives(a: np.ndarray, threshold: float = 1e-12) -> float:
    """Zero entries in [-threshold, 0) in place; return the largest
    magnitude removed."""
    sel = (a < 0.0) & (a >= -threshold)
    if not sel.any():
        return 0.0
    worst = float(-a[sel].min())
    a[sel] = 0.0
    return worst


def solve(observed: ObservedMatrix, params: SolverParams, *,
          factors: str = "xy", keep_trace: bool = False) -> Solution:
    """Run the alternating-direction scheme on the observed data.

    Parameters
    ----------
    observed : ObservedMatrix
        Sampled entries of the matrix to factor.  Must have nonzero norm.
    params : SolverParams
        Typically from :func:`default_params`, possibly adjusted.
    factors : str
        "xy" (default) returns the least-squares blocks X, Y with tiny
        negative entries (above -1e-12) clamped to zero and the clamped
        magnitude reported.  "uv" returns the projected copies U, V,
        which are nonnegative by construction.
    keep_trace : bool
        Keep the full residual history and per-sweep multiplier norms on
        the returned Solution.  Off by default; the driver then retains
        only the two residuals the stopping rule needs.

    Returns
    -------
    Solution
        Factors in the original data scale plus diagnostics.  The final
        internal state (in rescaled coordinates) rides along for audits.
    """
    if factors not in ("xy", "uv"):
        raise ValueError(f"factors must be 'xy' or 'uv', got {factors!r}")
    na = observed.norm
    if na == 0:
        raise ValueError("empty observation: observed entries have zero norm")
    s = params.scale_target / na
    data = observed.scaled(s)
    state = init_state(data, params)
    mult_trace = [] if keep_trace else None
    stop_reason = "maxiter"
    for _ in range(params.maxiter):
        state = step(state, data, params)
        if keep_trace:
            mult_trace.append((frob_norm(state.Lam), frob_norm(state.Pi)))
        else:
            del state.f_history[:-2]
        reason = stopping_met(state.f_history, params.tol)
        if reason is not None:
            stop_reason = reason
            break
    if factors == "uv":
        x_out = state.U / s
        y_out = state.V.copy()
        clamp = 0.0
    else:
        x_out = state.X / s
        y_out = state.Y.copy()
        clamp = max(_clamp_tiny_negatives(x_out), _clamp_tiny_negatives(y_out))
    return Solution(
        X=x_out,
        Y=y_out,
        iterations=state.k,
        final_f=state.f_history[-1],
        stop_reason=stop_reason,
        clamp_magnitude=clamp,
        scale=s,
        state=state,
        f_trace=list(state.f_history) if keep_trace else None,
        multiplier_trace=mult_trace,
    )


def export_blocks(sol: Solution, observed: ObservedMatrix) -> dict:
    """Final iterate mapped back to the original data scale.

    Z is rebuilt from the returned factors so the observed entries match
    the input file verbatim.  Multipliers absorb the scale through their
    stationarity systems: Lam picks up one factor of 1/s, Pi two.
    """
    if sol.state is None:
        raise ValueError("solution carries no internal state to export")
    st, s = sol.state, sol.scale
    return {
        "X": sol.X,
        "Y": sol.Y,
        "Z": overwrite_observed(sol.X @ sol.Y, observed),
        "U": st.U / s,
        "V": st.V.copy(),
        "Lambda": st.Lam / s,
        "Pi": st.Pi / (s * s),
    }
