"""Dense matrices, sampling masks, and projection operators.

Matrices in this package are plain 2-D float64 numpy arrays in C order.
``SampleMask`` is a canonical (sorted, duplicate-free) set of observed
index pairs and ``ObservedMatrix`` couples a mask with the observed
values.  The projections defined here, onto the mask, onto its
complement, and onto the nonnegative orthant, are the only entry points
the solvers use to touch the sampling pattern.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SampleMask",
    "ObservedMatrix",
    "as_matrix",
    "frob_norm",
    "project_mask",
    "project_mask_complement",
    "project_nonneg",
    "gather",
    "embed",
    "masked_product",
    "overwrite_observed",
]


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D float64 array."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def frob_norm(a) -> float:
    """Frobenius norm, the root of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64)))


@dataclass(eq=False)
class SampleMask:
    """Sorted, duplicate-free set of observed (row, col) index pairs.

    ``ii`` and ``jj`` are parallel int64 arrays sorted lexicographically
    by (row, col).  The canonical order makes masks comparable and file
    output deterministic.  Index arrays are marked read-only after
    construction; treat instances as immutable values.
    """

    rows: int
    cols: int
    ii: np.ndarray
    jj: np.ndarray

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError(f"mask bounds must be positive, got {self.rows}x{self.cols}")
        ii = np.asarray(self.ii, dtype=np.int64).copy()
        jj = np.asarray(self.jj, dtype=np.int64).copy()
        if ii.ndim != 1 or ii.shape != jj.shape:
            raise ValueError("index arrays must be 1-D and of equal length")
        if ii.size:
            if ii.min() < 0 or ii.max() >= self.rows or jj.min() < 0 or jj.max() >= self.cols:
                raise ValueError(f"mask indices out of bounds for a {self.rows}x{self.cols} matrix")
            flat = ii * self.cols + jj
            if np.any(np.diff(flat) < 0):
                order = np.argsort(flat, kind="stable")
                ii, jj, flat = ii[order], jj[order], flat[order]
            if np.any(np.diff(flat) == 0):
                raise ValueError("duplicate index pairs in mask")
        ii.setflags(write=False)
        jj.setflags(write=False)
        self.ii = ii
        self.jj = jj

    @classmethod
    def from_pairs(cls, rows: int, cols: int, pairs) -> "SampleMask":
        """Build a canonical mask from an iterable of (i, j) pairs."""
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(rows, cols, arr[:, 0], arr[:, 1])

    @classmethod
    def from_dense(cls, keep) -> "SampleMask":
        """Mask of the True positions of a boolean matrix."""
        keep = np.asarray(keep, dtype=bool)
        if keep.ndim != 2:
            raise ValueError("boolean mask must be 2-D")
        ii, jj = np.nonzero(keep)
        return cls(keep.shape[0], keep.shape[1], ii, jj)

    @classmethod
    def full(cls, rows: int, cols: int) -> "SampleMask":
        ii, jj = np.divmod(np.arange(rows * cols, dtype=np.int64), cols)
        return cls(rows, cols, ii, jj)

    @classmethod
    def empty(cls, rows: int, cols: int) -> "SampleMask":
        z = np.zeros(0, dtype=np.int64)
        return cls(rows, cols, z, z)

    @property
    def count(self) -> int:
        return int(self.ii.size)

    @property
    def sample_rate(self) -> float:
        return self.count / (self.rows * self.cols)

    @property
    def entries(self) -> np.ndarray:
        """Index pairs as an (count, 2) array in canonical order."""
        return np.stack([self.ii, self.jj], axis=1)

    def dense_bool(self) -> np.ndarray:
        keep = np.zeros((self.rows, self.cols), dtype=bool)
        keep[self.ii, self.jj] = True
        return keep

    def __eq__(self, other):
        if not isinstance(other, SampleMask):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.ii, other.ii)
            and np.array_equal(self.jj, other.jj)
        )


@dataclass(eq=False)
class ObservedMatrix:
    """Observed entries of a partially sampled matrix.

    ``values[k]`` sits at ``(mask.ii[k], mask.jj[k])``.  Negative observed
    values are accepted (real data can dip below zero) but warned about,
    because every model here assumes a nonnegative ground truth.
    """

    mask: SampleMask
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).copy()
        if v.ndim != 1 or v.size != self.mask.count:
            raise ValueError(f"expected {self.mask.count} observed values, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("observed values contain NaN or Inf")
        if v.size and v.min() < 0:
            warnings.warn("observed values contain negative entries; nonnegative factor models assume M >= 0")
        v.setflags(write=False)
        self.values = v

    @property
    def shape(self) -> tuple[int, int]:
        return (self.mask.rows, self.mask.cols)

    @property
    def sample_rate(self) -> float:
        return self.mask.sample_rate

    @property
    def norm(self) -> float:
        """Frobenius norm of the embedded observed data."""
        return float(np.linalg.norm(self.values))

    def to_dense(self) -> np.ndarray:
        """Dense embedding with zeros off the mask."""
        return embed(self.values, self.mask)

    def scaled(self, factor: float) -> "ObservedMatrix":
        return ObservedMatrix(self.mask, self.values * factor)


def _check_bounds(a: np.ndarray, mask: SampleMask) -> None:
    if a.shape != (mask.rows, mask.cols):
        raise ValueError(f"matrix shape {a.shape} does not match mask bounds ({mask.rows}, {mask.cols})")


def project_mask(a, mask: SampleMask) -> np.ndarray:
    """Copy of ``a`` with every entry off the mask zeroed."""
    a = np.asarray(a, dtype=np.float64)
    _check_bounds(a, mask)
    out = np.zeros_like(a)
    out[mask.ii, mask.jj] = a[mask.ii, mask.jj]
    return out


def project_mask_complement(a, mask: SampleMask) -> np.ndarray:
    """Copy of ``a`` with every entry on the mask zeroed."""
    a = np.asarray(a, dtype=np.float64)
    _check_bounds(a, mask)
    out = a.copy()
    out[mask.ii, mask.jj] = 0.0
    return out


def project_nonneg(a) -> np.ndarray:
    """Entrywise max(a, 0)."""
    return np.maximum(np.asarray(a, dtype=np.float64), 0.0)


def gather(a, mask: SampleMask) -> np.ndarray:
    """Entries of ``a`` on the mask, in canonical order."""
    a = np.asarray(a, dtype=np.float64)
    _check_bounds(a, mask)
    return a[mask.ii, mask.jj]


def embed(values, mask: SampleMask) -> np.ndarray:
    """Dense matrix holding ``values`` on the mask and zeros elsewhere."""
    out = np.zeros((mask.rows, mask.cols))
    out[mask.ii, mask.jj] = values
    return out


def masked_product(x: np.ndarray, y: np.ndarray, mask: SampleMask) -> np.ndarray:
    """Entries of the product x @ y on the mask, without forming it densely."""
    return np.einsum("tk,kt->t", x[mask.ii, :], y[:, mask.jj])


def overwrite_observed(a, observed: ObservedMatrix) -> np.ndarray:
    """Copy of ``a`` with the observed entries replaced by the data.

    Values are copied verbatim, so project_mask(result - data) is zero
    exactly, not merely to rounding.
    """
    a = np.asarray(a, dtype=np.float64)
    _check_bounds(a, observed.mask)
    out = a.copy()
    out[observed.mask.ii, observed.mask.jj] = observed.values
    return out
