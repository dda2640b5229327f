"""First-order optimality residuals for the split factorization problem.

A tuple (X, Y, Z, U, V) with multipliers (Lam, Pi) is a stationary point
of the split problem exactly when every residual reported here is zero:
the two stationarity systems, the two mask conditions tying Z to the
product and to the data, the two splitting gaps X - U and Y - V, and the
sign plus complementarity conditions linking each multiplier to its
projected block (Lam <= 0 <= U with Lam * U = 0, likewise Pi and V).

Residuals are Frobenius norms; the scaled variants divide by one plus
the norm of the observed values so reports are comparable across data
magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .masking import (
    ObservedMatrix,
    as_matrix,
    frob_norm,
    gather,
    project_mask_complement,
    project_nonneg,
)

__all__ = ["KktReport", "kkt_residuals"]


@dataclass
class KktReport:
    """Residual norms of the first-order conditions at a candidate point."""

    r_stat_x: float
    r_stat_y: float
    r_comp_mask: float
    r_feas_mask: float
    r_xu: float
    r_yv: float
    r_sign_lambda: float
    r_comp_lambda_u: float
    r_sign_pi: float
    r_comp_pi_v: float
    scale_denominator: float

    RAW_FIELDS: ClassVar[tuple] = (
        "r_stat_x",
        "r_stat_y",
        "r_comp_mask",
        "r_feas_mask",
        "r_xu",
        "r_yv",
        "r_sign_lambda",
        "r_comp_lambda_u",
        "r_sign_pi",
        "r_comp_pi_v",
    )

    def raw(self) -> dict:
        return {name: getattr(self, name) for name in self.RAW_FIELDS}

    def scaled(self) -> dict:
        d = self.scale_denominator
        return {name: getattr(self, name) / d for name in self.RAW_FIELDS}

    def max_scaled(self) -> float:
        return max(self.scaled().values())

    def as_dict(self) -> dict:
        """Flat key-value view: raw residuals, scaled residuals, denominator."""
        out = self.raw()
        for name, value in self.scaled().items():
            out["scaled_" + name] = value
        out["scale_denominator"] = self.scale_denominator
        return out


def _expect_shape(name: str, a: np.ndarray, shape: tuple) -> np.ndarray:
    if a.shape != shape:
        raise ValueError(f"block {name} has shape {a.shape}, expected {shape}")
    return a


def kkt_residuals(X, Y, Z, U, V, Lam, Pi, observed: ObservedMatrix) -> KktReport:
    """Evaluate all first-order residuals at a candidate point.

    Parameters
    ----------
    X, Y, Z, U, V, Lam, Pi : array_like
        Factor blocks (m x q and q x n), the completed matrix (m x n),
        the projected copies, and the multipliers of X = U and Y = V.
    observed : ObservedMatrix
        The data the candidate is checked against.
    """
    X = as_matrix(X)
    Y = as_matrix(Y)
    m, n = observed.shape
    q = X.shape[1]
    _expect_shape("X", X, (m, q))
    _expect_shape("Y", as_matrix(Y), (q, n))
    Z = _expect_shape("Z", as_matrix(Z), (m, n))
    U = _expect_shape("U", as_matrix(U), (m, q))
    V = _expect_shape("V", as_matrix(V), (q, n))
    Lam = _expect_shape("Lambda", as_matrix(Lam), (m, q))
    Pi = _expect_shape("Pi", as_matrix(Pi), (q, n))

    r = X @ Y - Z
    return KktReport(
        r_stat_x=frob_norm(r @ Y.T + Lam),
        r_stat_y=frob_norm(X.T @ r + Pi),
        r_comp_mask=frob_norm(project_mask_complement(r, observed.mask)),
        r_feas_mask=frob_norm(gather(Z, observed.mask) - observed.values),
        r_xu=frob_norm(X - U),
        r_yv=frob_norm(Y - V),
        r_sign_lambda=frob_norm(project_nonneg(Lam)) + frob_norm(project_nonneg(-U)),
        r_comp_lambda_u=frob_norm(Lam * U),
        r_sign_pi=frob_norm(project_nonneg(Pi)) + frob_norm(project_nonneg(-V)),
        r_comp_pi_v=frob_norm(Pi * V),
        scale_denominator=1.0 + float(np.linalg.norm(observed.values)),
    )
