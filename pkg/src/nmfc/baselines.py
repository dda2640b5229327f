"""Comparison algorithms sharing the solver's stopping rule and output
contract: alternating least squares with projection, multiplicative
updates on zero-filled data, a successively over-relaxed low-rank
fitting scheme, and singular-value shrinkage fixed-point iteration.

All four run through :func:`run_baseline`, which mirrors the Solution
returned by the alternating-direction solver so benchmark code can treat
every method uniformly.  None of them rescales the input; their iterates
scale linearly with the data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .admm import Solution, stopping_met
from .masking import (
    ObservedMatrix,
    gather,
    masked_product,
    overwrite_observed,
    project_nonneg,
)

__all__ = [
    "BaselineParams",
    "BASELINE_KINDS",
    "als_step",
    "mult_step",
    "lmafit_sor_step",
    "fpca_step",
    "svd_shrink",
    "run_baseline",
]

BASELINE_KINDS = ("als", "mult", "lmafit-sor", "fpca")


@dataclass
class BaselineParams:
    """Knobs shared by the baseline drivers.

    omega is the over-relaxation weight of the low-rank fitting scheme
    (1 recovers plain alternating least squares on Z), epsilon the
    denominator guard of the multiplicative updates, tau and mu the step
    and shrinkage weight of the singular-value iteration.  mu left as
    None picks 1e-2 times the top singular value of the embedded data.
    """

    q: int
    omega: float = 1.0
    epsilon: float = 1e-9
    tau: float = 1.0
    mu: float | None = None
    tol: float = 1e-5
    maxiter: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"inner dimension q must be >= 1, got {self.q}")
        if self.omega < 1:
            raise ValueError(f"over-relaxation weight must be >= 1, got {self.omega}")
        if self.epsilon <= 0:
            raise ValueError(f"denominator guard must be positive, got {self.epsilon}")
        if self.tau <= 0:
            raise ValueError(f"gradient step tau must be positive, got {self.tau}")
        if self.mu is not None and self.mu <= 0:
            raise ValueError(f"shrinkage weight mu must be positive, got {self.mu}")
        if self.tol <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        if self.maxiter < 1:
            raise ValueError(f"maxiter must be >= 1, got {self.maxiter}")


def _psd_pinv(g: np.ndarray) -> np.ndarray:
    """Pseudo-inverse of a symmetric PSD matrix via its eigendecomposition,
    with small eigenvalues cut off."""
    w, vecs = np.linalg.eigh(g)
    cut = w.max(initial=0.0) * g.shape[0] * np.finfo(float).eps
    inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
    return (vecs * inv) @ vecs.T


def als_step(X, Y, Z) -> tuple[np.ndarray, np.ndarray]:
    """Projected alternating least squares sweep on a dense target.

    X solves the Y-Gram system and is clamped at zero, then Y solves the
    X-Gram system with the updated X and is clamped as well.  Grams may
    be singular, hence the pseudo-inverse.
    """
    xn = project_nonneg(Z @ Y.T @ _psd_pinv(Y @ Y.T))
    yn = project_nonneg(_psd_pinv(xn.T @ xn) @ (xn.T @ Z))
    return xn, yn


def mult_step(X, Y, m_obs, epsilon: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Multiplicative update sweep against zero-filled data.

    Entries are rescaled by the ratio of the data-fit numerator to the
    current-model denominator; zero entries stay zero and nonnegativity
    is preserved.  Unobserved entries of ``m_obs`` are treated as zeros,
    which biases the fit toward zero off the mask; that is the price of
    running a full-data method on incomplete data.
    """
    xn = X * (m_obs @ Y.T) / (X @ (Y @ Y.T) + epsilon)
    yn = Y * (xn.T @ m_obs) / ((xn.T @ xn) @ Y + epsilon)
    return xn, yn


def lmafit_sor_step(X, Y, Z, observed: ObservedMatrix, omega: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Over-relaxed alternating least squares sweep with data refill.

    Both factor updates are plain least squares (no sign constraint),
    blended with the previous iterate by weight omega >= 1; Z then takes
    the blended product off the mask and the observed values on it.
    """
    xn = Z @ Y.T @ _psd_pinv(Y @ Y.T)
    xw = omega * xn + (1.0 - omega) * X
    yn = _psd_pinv(xw.T @ xw) @ (xw.T @ Z)
    yw = omega * yn + (1.0 - omega) * Y
    zw = overwrite_observed(xw @ yw, observed)
    return xw, yw, zw


def svd_shrink(a, nu: float) -> np.ndarray:
    """Shrink every singular value by nu, dropping those below it."""
    if nu < 0:
        raise ValueError(f"shrinkage amount must be nonnegative, got {nu}")
    u, s, vt = np.linalg.svd(np.asarray(a, dtype=np.float64), full_matrices=False)
    s = np.maximum(s - nu, 0.0)
    return (u * s) @ vt


def fpca_step(X, observed: ObservedMatrix, tau: float, mu: float) -> np.ndarray:
    """Gradient step on the observed misfit followed by singular-value
    shrinkage by tau * mu.  With mu = 0 this is a pure projected
    gradient step."""
    if tau <= 0:
        raise ValueError(f"gradient step tau must be positive, got {tau}")
    if mu < 0:
        raise ValueError(f"shrinkage weight mu must be nonnegative, got {mu}")
    grad = np.zeros_like(np.asarray(X, dtype=np.float64))
    grad[observed.mask.ii, observed.mask.jj] = gather(X, observed.mask) - observed.values
    return svd_shrink(X - tau * grad, tau * mu)


def _drive(observed, params, advance, finalize, keep_trace):
    """Shared iteration loop: advance, record residual, stop per rule."""
    f_hist: list[float] = []
    stop_reason = "maxiter"
    iterations = 0
    for iterations in range(1, params.maxiter + 1):
        f_hist.append(advance())
        if not keep_trace:
            del f_hist[:-2]
        reason = stopping_met(f_hist, params.tol)
        if reason is not None:
            stop_reason = reason
            break
    x, y = finalize()
    return Solution(
        X=x,
        Y=y,
        iterations=iterations,
        final_f=f_hist[-1],
        stop_reason=stop_reason,
        f_trace=list(f_hist) if keep_trace else None,
    )


def _run_als(observed, params, keep_trace):
    m, n = observed.shape
    na = observed.norm
    rng = np.random.default_rng(params.seed)
    state = {"X": np.zeros((m, params.q)), "Y": rng.random((params.q, n)),
             "Z": observed.to_dense()}

    def advance():
        x, y = als_step(state["X"], state["Y"], state["Z"])
        p = x @ y
        state.update(X=x, Y=y, Z=overwrite_observed(p, observed))
        return float(np.linalg.norm(gather(p, observed.mask) - observed.values) / na)

    return _drive(observed, params, advance, lambda: (state["X"], state["Y"]), keep_trace)


def _run_mult(observed, params, keep_trace):
    m, n = observed.shape
    na = observed.norm
    rng = np.random.default_rng(params.seed)
    m_obs = observed.to_dense()
    state = {"X": rng.random((m, params.q)), "Y": rng.random((params.q, n))}

    def advance():
        x, y = mult_step(state["X"], state["Y"], m_obs, params.epsilon)
        state.update(X=x, Y=y)
        return float(np.linalg.norm(masked_product(x, y, observed.mask) - observed.values) / na)

    return _drive(observed, params, advance, lambda: (state["X"], state["Y"]), keep_trace)


def _run_lmafit_sor(observed, params, keep_trace):
    m, n = observed.shape
    na = observed.norm
    rng = np.random.default_rng(params.seed)
    state = {"X": np.zeros((m, params.q)), "Y": rng.random((params.q, n)),
             "Z": observed.to_dense()}

    def advance():
        x, y, z = lmafit_sor_step(state["X"], state["Y"], state["Z"], observed, params.omega)
        state.update(X=x, Y=y, Z=z)
        return float(np.linalg.norm(masked_product(x, y, observed.mask) - observed.values) / na)

    return _drive(observed, params, advance, lambda: (state["X"], state["Y"]), keep_trace)


def _run_fpca(observed, params, keep_trace):
    na = observed.norm
    w = observed.to_dense()
    mu = params.mu
    if mu is None:
        mu = 1e-2 * float(np.linalg.svd(w, compute_uv=False)[0])
    state = {"W": w}

    def advance():
        state["W"] = fpca_step(state["W"], observed, params.tau, mu)
        return float(np.linalg.norm(gather(state["W"], observed.mask) - observed.values) / na)

    def finalize():
        # the iterate is a full matrix; report its best rank-q split
        u, s, vt = np.linalg.svd(state["W"], full_matrices=False)
        root = np.sqrt(s[: params.q])
        return u[:, : params.q] * root, root[:, None] * vt[: params.q]

    return _drive(observed, params, advance, finalize, keep_trace)


_DRIVERS = {
    "als": _run_als,
    "mult": _run_mult,
    "lmafit-sor": _run_lmafit_sor,
    "fpca": _run_fpca,
}


def run_baseline(kind: str, observed: ObservedMatrix, params: BaselineParams, *,
                 keep_trace: bool = False) -> Solution:
    """Run one comparison algorithm end to end.

    Parameters
    ----------
    kind : str
        One of "als", "mult", "lmafit-sor", "fpca".
    observed : ObservedMatrix
        Sampled data; must have nonzero norm.
    params : BaselineParams
    keep_trace : bool
        Keep the full residual history on the Solution.

    Returns
    -------
    Solution
        Same contract as the main solver.  The factors of "als" and
        "mult" are nonnegative by construction; "lmafit-sor" and "fpca"
        carry no sign constraint, and the fpca factors are the rank-q
        truncated SVD of its final completed matrix.
    """
    if kind not in _DRIVERS:
        raise ValueError(f"unknown baseline {kind!r}; expected one of {', '.join(BASELINE_KINDS)}")
    if observed.norm == 0:
        raise ValueError("empty observation: observed entries have zero norm")
    return _DRIVERS[kind](observed, params, keep_trace)
