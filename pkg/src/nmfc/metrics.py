"""Recovery quality metrics: relative error, mean squared error, and
peak signal-to-noise ratio against a known ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .masking import as_matrix

__all__ = ["EvalReport", "evaluate"]


@dataclass
class EvalReport:
    """Quality numbers for one recovery, plus the wall-clock of the solve.

    psnr is +inf exactly when mse is zero; reports serialize that as the
    string "inf".
    """

    rel_err: float
    mse: float
    psnr: float
    cpu_seconds: float = 0.0


def evaluate(m_hat, m_true, max_i: float, cpu_seconds: float = 0.0) -> EvalReport:
    """Compare a recovered matrix against the truth.

    Parameters
    ----------
    m_hat, m_true : array_like
        Recovered and reference matrices of equal shape.
    max_i : float
        Peak signal value for the PSNR (1 for unit-scaled grayscale,
        1023 for 10-bit sensor data, and so on).  Must be positive.
    cpu_seconds : float
        Wall-clock seconds of the solve that produced m_hat; recorded
        verbatim.
    """
    m_hat = as_matrix(m_hat)
    m_true = as_matrix(m_true)
    if m_hat.shape != m_true.shape:
        raise ValueError(f"shape mismatch: {m_hat.shape} vs {m_true.shape}")
    if max_i <= 0:
        raise ValueError(f"peak value must be positive, got {max_i}")
    diff = m_hat - m_true
    mse = float(np.mean(diff * diff))
    norm_true = float(np.linalg.norm(m_true))
    norm_diff = float(np.linalg.norm(diff))
    if norm_true > 0:
        rel_err = norm_diff / norm_true
    else:
        rel_err = 0.0 if norm_diff == 0 else math.inf
    psnr = math.inf if mse == 0 else 20.0 * math.log10(max_i / math.sqrt(mse))
    return EvalReport(rel_err=rel_err, mse=mse, psnr=psnr, cpu_seconds=cpu_seconds)
