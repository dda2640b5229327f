"""Synthetic nonnegative low-rank instances and sampling patterns.

Ground truths are products L D R with L (m x r) and R (r x n) drawn
i.i.d. uniform on [0, 1) and D the diagonal 1..r, which spreads the
singular values over roughly a factor of r.  Masks draw exactly
round(sr * m * n) positions uniformly without replacement.  All
randomness flows through numpy's default PCG64 generator, so every
instance is reproducible from its integer seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .masking import ObservedMatrix, SampleMask, gather

__all__ = ["SyntheticProblem", "gen_ldr", "sample_mask", "make_problem"]


@dataclass(eq=False)
class SyntheticProblem:
    """A generated ground truth, its factors, and (optionally) a mask."""

    M: np.ndarray
    L: np.ndarray
    D: np.ndarray
    R: np.ndarray
    seed: object = None
    mask: SampleMask | None = None
    sr: float | None = None


def gen_ldr(m: int, n: int, r: int, seed) -> SyntheticProblem:
    """Draw a rank-r nonnegative ground truth M = L D R.

    Parameters
    ----------
    m, n : int
        Matrix dimensions.
    r : int
        Target rank, 1 <= r <= min(m, n).  Generic uniform draws make the
        rank exactly r.
    seed : int or numpy seed-like
        Feeds numpy's default generator.
    """
    if not 1 <= r <= min(m, n):
        raise ValueError(f"rank must satisfy 1 <= r <= min(m, n) = {min(m, n)}, got {r}")
    rng = np.random.default_rng(seed)
    L = rng.random((m, r))
    R = rng.random((r, n))
    d = np.arange(1.0, r + 1.0)
    M = (L * d) @ R
    return SyntheticProblem(M=M, L=L, D=np.diag(d), R=R, seed=seed)


def sample_mask(m: int, n: int, sr: float, seed) -> SampleMask:
    """Uniform mask of exactly round(sr * m * n) distinct positions."""
    if not 0.0 < sr <= 1.0:
        raise ValueError(f"sample rate must lie in (0, 1], got {sr}")
    count = int(round(sr * m * n))
    rng = np.random.default_rng(seed)
    flat = rng.choice(m * n, size=count, replace=False)
    flat.sort()
    ii, jj = np.divmod(flat, n)
    return SampleMask(m, n, ii, jj)


def make_problem(m: int, n: int, r: int, sr: float, seed: int) -> tuple[ObservedMatrix, SyntheticProblem]:
    """Generate a ground truth and its sampled observation in one call.

    The truth and the mask draw from independent child streams of the
    given seed, so changing the sample rate leaves the ground truth
    untouched for the same seed.
    """
    seed_truth, seed_mask = np.random.SeedSequence(seed).spawn(2)
    prob = gen_ldr(m, n, r, seed_truth)
    prob.seed = seed
    prob.mask = sample_mask(m, n, sr, seed_mask)
    prob.sr = sr
    observed = ObservedMatrix(prob.mask, gather(prob.M, prob.mask))
    return observed, prob
