"""Dense-matrix least squares and regression metrics.

Everything here operates on plain 64-bit float arrays. The solver follows a
two-stage strategy: column-pivoted QR for full-rank designs, falling back to
an SVD-based minimum-norm solve when the design is rank deficient. Rank is
judged from the singular values so the reported diagnostic is consistent
between both paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as la

from .errors import ContractError, DomainError

# Singular values below this fraction of the largest one count as zero.
RANK_TOLERANCE = 1e-10


class DenseMatrix:
    """Immutable row-major matrix of finite 64-bit floats.

    Parameters
    ----------
    data : array-like
        Two-dimensional array of values. Rejected if any entry is NaN or
        infinite.
    """

    __slots__ = ("_a",)

    def __init__(self, data):
        a = np.array(data, dtype=float)
        if a.ndim != 2:
            raise ContractError(f"DenseMatrix needs 2-D data, got ndim={a.ndim}")
        if a.size == 0:
            raise ContractError("DenseMatrix cannot be empty")
        if not np.all(np.isfinite(a)):
            raise ContractError("DenseMatrix entries must be finite")
        a.setflags(write=False)
        self._a = a

    @classmethod
    def from_flat(cls, rows: int, cols: int, data) -> "DenseMatrix":
        """Build from a flat row-major value sequence of length rows*cols."""
        flat = np.asarray(data, dtype=float)
        if flat.ndim != 1 or flat.size != rows * cols:
            raise ContractError(
                f"expected {rows * cols} values for a {rows}x{cols} matrix, got {flat.size}"
            )
        return cls(flat.reshape(rows, cols))

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def array(self) -> np.ndarray:
        """Read-only 2-D ndarray view."""
        return self._a

    @property
    def flat(self) -> np.ndarray:
        """Read-only row-major 1-D view."""
        return self._a.reshape(-1)

    def __getitem__(self, idx):
        return self._a[idx]

    def __repr__(self):
        return f"DenseMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class MetricPair:
    """R-squared / MAE pair for one fitted model on one data split."""

    r_squared: float
    mae: float


@dataclass(frozen=True)
class LeastSquaresSolution:
    """Coefficients plus rank diagnostics from :func:`solve_least_squares`."""

    coefficients: np.ndarray
    rank: int
    rank_deficient: bool
    singular_values: np.ndarray


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pearson correlation matrix with its column names."""

    names: tuple
    matrix: DenseMatrix

    def entry(self, i: int, j: int) -> float:
        return float(self.matrix.array[i, j])


def _as_matrix(design) -> np.ndarray:
    if isinstance(design, DenseMatrix):
        return design.array
    a = np.asarray(design, dtype=float)
    if a.ndim != 2:
        raise ContractError(f"design must be 2-D, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ContractError("design entries must be finite")
    return a


def _as_vector(v, name: str) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise ContractError(f"{name} must be 1-D, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ContractError(f"{name} entries must be finite")
    return a


def solve_least_squares(design, target) -> LeastSquaresSolution:
    """Solve min ||design @ beta - target||_2 for beta.

    Full-rank designs are solved by column-pivoted QR. If the singular
    values indicate rank < p the solver switches to an SVD minimum-norm
    solve and flags the solution as rank deficient.

    Parameters
    ----------
    design : DenseMatrix or array-like, shape (n, p)
    target : array-like, shape (n,)

    Returns
    -------
    LeastSquaresSolution
        ``coefficients`` has length p; ``rank_deficient`` is True when the
        estimated rank is below p.
    """
    a = _as_matrix(design)
    b = _as_vector(target, "target")
    n, p = a.shape
    if n < 1 or p < 1:
        raise ContractError(f"design must be at least 1x1, got {n}x{p}")
    if b.shape[0] != n:
        raise ContractError(f"design has {n} rows but target has {b.shape[0]} entries")

    sv = la.svd(a, compute_uv=False)
    cutoff = RANK_TOLERANCE * sv[0] if sv[0] > 0 else 0.0
    rank = int(np.sum(sv > cutoff))

    if rank == p:
        q, r, piv = la.qr(a, mode="economic", pivoting=True)
        z = la.solve_triangular(r, q.T @ b)
        beta = np.empty(p)
        beta[piv] = z
    else:
        beta, _, _, _ = la.lstsq(a, b, cond=RANK_TOLERANCE, lapack_driver="gelsd")

    return LeastSquaresSolution(
        coefficients=beta,
        rank=rank,
        rank_deficient=rank < p,
        singular_values=sv,
    )


def r_squared(y_true, y_pred) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot.

    SS_tot is taken about the mean of ``y_true``. The result is at most 1
    and can be negative for predictors worse than the mean.

    Raises
    ------
    DomainError
        If ``y_true`` is constant (SS_tot = 0).
    """
    yt = _as_vector(y_true, "y_true")
    yp = _as_vector(y_pred, "y_pred")
    if yt.shape != yp.shape:
        raise ContractError(f"length mismatch: y_true has {yt.size}, y_pred has {yp.size}")
    if yt.size < 2:
        raise ContractError("r_squared needs at least 2 samples")
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        raise DomainError("y_true is constant; R^2 is undefined (SS_tot = 0)")
    ss_res = float(np.sum((yt - yp) ** 2))
    return 1.0 - ss_res / ss_tot


def mean_absolute_error(y_true, y_pred) -> float:
    """Arithmetic mean of |y_true - y_pred|."""
    yt = _as_vector(y_true, "y_true")
    yp = _as_vector(y_pred, "y_pred")
    if yt.shape != yp.shape:
        raise ContractError(f"length mismatch: y_true has {yt.size}, y_pred has {yp.size}")
    if yt.size < 1:
        raise ContractError("mean_absolute_error needs at least 1 sample")
    return float(np.mean(np.abs(yt - yp)))


def metric_pair(y_true, y_pred) -> MetricPair:
    """Convenience bundle of r_squared and mean_absolute_error."""
    return MetricPair(r_squared(y_true, y_pred), mean_absolute_error(y_true, y_pred))


def pearson_correlation_matrix(columns) -> CorrelationMatrix:
    """Pearson correlation coefficients between named columns.

    Parameters
    ----------
    columns : mapping or sequence of (name, values) pairs
        All columns must share the same length n >= 2 and have nonzero
        variance.

    Returns
    -------
    CorrelationMatrix
        Symmetric (bit-for-bit) with an exact unit diagonal.
    """
    if isinstance(columns, Mapping):
        items = list(columns.items())
    else:
        items = [(str(name), vals) for name, vals in columns]
    if not items:
        raise ContractError("need at least one column")
    names = tuple(name for name, _ in items)
    vecs = [_as_vector(vals, f"column {name!r}") for name, vals in items]
    n = vecs[0].size
    if n < 2:
        raise ContractError("columns need at least 2 entries")
    for name, v in zip(names, vecs):
        if v.size != n:
            raise ContractError(f"column {name!r} has length {v.size}, expected {n}")

    centered = []
    norms = []
    for name, v in zip(names, vecs):
        c = v - v.mean()
        norm = float(np.sqrt(np.sum(c * c)))
        if norm == 0.0:
            raise DomainError(f"column {name!r} has zero variance")
        centered.append(c)
        norms.append(norm)

    k = len(names)
    m = np.ones((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            r = float(np.dot(centered[i], centered[j])) / (norms[i] * norms[j])
            m[i, j] = r
            m[j, i] = r
    return CorrelationMatrix(names=names, matrix=DenseMatrix(m))
