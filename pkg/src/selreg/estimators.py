"""Nadaraya-Watson estimators of mean, variance and covariate density.

All estimators evaluate against a frozen FitState (training data + kernel +
bandwidth). Evaluation is exact brute force, O(n) per query point; at desk
scale (n <= 2e4) nothing faster is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .kernels import KernelSpec, eval_sq

# Row-block size for pairwise-distance work in LOO-CV; bounds peak memory.
_CHUNK = 1024


class DegenerateNeighborhood(RuntimeError):
    """Raised when every kernel weight at the query point is zero."""


@dataclass(frozen=True)
class Dataset:
    """Covariate matrix (n x d) plus optional response vector of length n."""

    x: np.ndarray
    y: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.ascontiguousarray(np.asarray(self.x, dtype=float))
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError("covariates must form an (n, d) matrix with n >= 1")
        if not np.all(np.isfinite(x)):
            raise ValueError("covariates must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        if self.y is not None:
            y = np.ascontiguousarray(np.asarray(self.y, dtype=float))
            if y.shape != (x.shape[0],):
                raise ValueError("responses must be a vector of length n")
            if not np.all(np.isfinite(y)):
                raise ValueError("responses must be finite")
            y.setflags(write=False)
            object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class FitState:
    """Frozen training data, kernel and bandwidth; estimators read from it."""

    train: Dataset
    kernel: KernelSpec
    h: float

    def __post_init__(self):
        if self.train.y is None:
            raise ValueError("fitting requires responses")
        if not (self.h > 0.0):
            raise ValueError("bandwidth must be positive")
        if self.kernel.dimension != self.train.d:
            raise ValueError(
                f"kernel dimension {self.kernel.dimension} does not match "
                f"data dimension {self.train.d}")


@dataclass(frozen=True)
class PointEvaluation:
    """All estimator outputs at one query point.

    For a query with zero kernel mass (possible for the bounded-support
    kernel, or by underflow far from the data) f_hat and sigma2_hat are NaN
    and p_hat is 0.
    """

    f_hat: float
    sigma2_hat: float
    p_hat: float
    weight_denominator: float


def _query_point(fit: FitState, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.shape != (fit.train.d,):
        raise ValueError(f"query has shape {x.shape}, expected ({fit.train.d},)")
    return x


def _kernel_row(fit: FitState, x: np.ndarray) -> tuple[np.ndarray, float]:
    diff = (fit.train.x - x) / fit.h
    vals = eval_sq(fit.kernel, np.einsum("ij,ij->i", diff, diff))
    return vals, float(vals.sum())


def nw_weights(fit: FitState, x) -> np.ndarray:
    """Normalized kernel weights of the training samples at x.

    Raises DegenerateNeighborhood when the weight denominator is zero.
    """
    vals, denom = _kernel_row(fit, _query_point(fit, x))
    if denom <= 0.0:
        raise DegenerateNeighborhood("zero kernel mass at the query point")
    return vals / denom


def predict_mean(fit: FitState, x) -> float:
    """NW regression estimate: kernel-weighted average of the responses."""
    return float(nw_weights(fit, x) @ fit.train.y)


def predict_variance(fit: FitState, x) -> float:
    """NW conditional-variance estimate, clamped to [0, inf).

    Weighted second moment minus squared weighted mean, computed in the
    equivalent centered form for numerical stability.
    """
    w = nw_weights(fit, x)
    m = float(w @ fit.train.y)
    return max(float(w @ np.square(fit.train.y - m)), 0.0)


def estimate_density(fit: FitState, x) -> float:
    """Kernel density estimate of the covariate density at x."""
    _, denom = _kernel_row(fit, _query_point(fit, x))
    return denom / (fit.train.n * fit.h ** fit.train.d)


def evaluate_point(fit: FitState, x) -> PointEvaluation:
    """Compute mean, variance and density estimates in a single pass."""
    vals, denom = _kernel_row(fit, _query_point(fit, x))
    p_hat = denom / (fit.train.n * fit.h ** fit.train.d)
    if denom <= 0.0:
        return PointEvaluation(f_hat=float("nan"), sigma2_hat=float("nan"),
                               p_hat=p_hat, weight_denominator=denom)
    w = vals / denom
    m = float(w @ fit.train.y)
    s2 = max(float(w @ np.square(fit.train.y - m)), 0.0)
    return PointEvaluation(f_hat=m, sigma2_hat=s2, p_hat=p_hat,
                           weight_denominator=denom)


def default_bandwidth_grid(data: Dataset, num: int = 30) -> np.ndarray:
    """Log-spaced bandwidth grid on [0.05, 1.0] x mean coordinate range."""
    spread = float(np.mean(data.x.max(axis=0) - data.x.min(axis=0)))
    if spread <= 0.0:
        spread = 1.0
    return np.geomspace(0.05 * spread, spread, num)


def select_bandwidth_loocv(data: Dataset, kernel: KernelSpec, grid) -> float:
    """Pick the grid bandwidth minimizing the leave-one-out squared error.

    For each h the criterion is sum_i (y_i - f_{-i}(x_i))^2, where f_{-i} is
    the NW mean fit without sample i. A held-out point whose remaining
    kernel mass is zero contributes the penalty (y_i - mean(y))^2, keeping
    the criterion finite and comparable across h. Ties go to the smaller h.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("bandwidth grid is empty")
    if np.any(grid <= 0.0) or not np.all(np.isfinite(grid)):
        raise ValueError("bandwidth grid entries must be positive reals")
    if data.y is None:
        raise ValueError("LOO-CV requires responses")
    n = data.n
    if n < 3:
        raise ValueError("LOO-CV needs at least 3 samples")

    y = data.y
    fallback = np.square(y - y.mean())
    ordered = np.sort(grid)
    scores = np.zeros(ordered.size)
    sq_norms = np.einsum("ij,ij->i", data.x, data.x)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        # pairwise squared distances for this row block, shared by all h
        sq = np.maximum(sq_norms[lo:hi, None] + sq_norms[None, :]
                        - 2.0 * (data.x[lo:hi] @ data.x.T), 0.0)
        rows = np.arange(lo, hi)
        for j, h in enumerate(ordered):
            vals = np.asarray(eval_sq(kernel, sq / (h * h)))
            vals[rows - lo, rows] = 0.0
            denom = vals.sum(axis=1)
            ok = denom > 0.0
            pred_err = np.where(ok, y[lo:hi] - (vals @ y)
                                / np.where(ok, denom, 1.0), 0.0)
            scores[j] += (float(np.sum(np.square(pred_err)))
                          + float(np.sum(fallback[lo:hi][~ok])))
    # argmin takes the first minimum, so exact ties go to the smaller h
    return float(ordered[np.argmin(scores)])


def fixed_bandwidth(kernel: KernelSpec, h: float) -> Callable[[Dataset], FitState]:
    """Fit rule using a constant bandwidth."""
    def rule(data: Dataset) -> FitState:
        return FitState(train=data, kernel=kernel, h=h)
    return rule


def power_bandwidth(kernel: KernelSpec, c: float,
                    exponent: float) -> Callable[[Dataset], FitState]:
    """Fit rule with the sample-size power law h = c * n ** exponent."""
    def rule(data: Dataset) -> FitState:
        return FitState(train=data, kernel=kernel, h=c * data.n ** exponent)
    return rule


def loocv_bandwidth(kernel: KernelSpec, grid=None,
                    fallback_h: float = 1.0) -> Callable[[Dataset], FitState]:
    """Fit rule selecting h by LOO-CV on ``grid`` (default grid if None).

    Datasets too small for LOO-CV (n < 3) get ``fallback_h``.
    """
    def rule(data: Dataset) -> FitState:
        if data.n < 3:
            return FitState(train=data, kernel=kernel, h=fallback_h)
        g = default_bandwidth_grid(data) if grid is None else grid
        return FitState(train=data, kernel=kernel,
                        h=select_bandwidth_loocv(data, kernel, g))
    return rule
