"""Smoothing kernels and their analytic constants.

Both kernels are symmetric, integrate to one, and admit a lower bound of the
form K(t) >= a * 1{||t|| <= b}; the pair (a, b) and the L2 norm
||K||_2 = (integral of K^2)^(1/2) feed the density gate and the variance
test of the abstention rule.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class KernelKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    EPANECHNIKOV = "epanechnikov"


@dataclass(frozen=True)
class KernelSpec:
    """A kernel function together with the constants the decision rule uses.

    Attributes
    ----------
    kind : KernelKind
    dimension : int
        Covariate dimension d.
    a, b : float
        Lower-bound constants: K(t) >= a for every ||t|| <= b.
    l2_norm : float
        ||K||_2 = (integral of K^2 over R^d)^(1/2).
    """

    kind: KernelKind
    dimension: int
    a: float
    b: float
    l2_norm: float


def kernel_spec(kind, dimension: int) -> KernelSpec:
    """Build a KernelSpec by kernel name ("gaussian" | "epanechnikov")."""
    kind = KernelKind(kind)
    if dimension < 1:
        raise ValueError("dimension must be a positive integer")
    a, b = lower_bound_constants(kind, dimension)
    return KernelSpec(kind=kind, dimension=dimension, a=a, b=b,
                      l2_norm=l2_norm_of(kind, dimension))


def eval_kernel(kernel: KernelSpec, t) -> float:
    """Evaluate K(t) for a point t of length ``kernel.dimension``."""
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        t = t.reshape(1)
    if t.shape != (kernel.dimension,):
        raise ValueError(
            f"point has shape {t.shape}, expected ({kernel.dimension},)")
    return float(eval_sq(kernel, np.dot(t, t)))


def eval_sq(kernel: KernelSpec, sq_norms):
    """Evaluate K at points given by their squared norms ||t||^2.

    Both supported kernels are radial, so this is the single evaluation
    path shared by scalar queries and the batched estimators.
    """
    sq = np.asarray(sq_norms, dtype=float)
    d = kernel.dimension
    if kernel.kind is KernelKind.GAUSSIAN:
        return (2.0 * math.pi) ** (-d / 2.0) * np.exp(-0.5 * sq)
    # Epanechnikov, d = 1: 0.75 * (1 - t^2) on |t| <= 1.
    return np.where(sq <= 1.0, 0.75 * (1.0 - sq), 0.0)


def l2_norm_of(kind, dimension: int) -> float:
    """||K||_2 in dimension d.

    Gaussian: (4 pi)^(-d/4). Epanechnikov (d=1): sqrt(3/5), from
    the closed form integral of (0.75 (1 - t^2))^2 over [-1, 1] = 0.6.
    """
    kind = KernelKind(kind)
    if kind is KernelKind.GAUSSIAN:
        if dimension < 1:
            raise ValueError("dimension must be a positive integer")
        return (4.0 * math.pi) ** (-dimension / 4.0)
    if dimension != 1:
        raise ValueError("the Epanechnikov kernel is only provided for d=1")
    return math.sqrt(0.6)


def lower_bound_constants(kind, dimension: int) -> tuple[float, float]:
    """Constants (a, b) with K(t) >= a * 1{||t|| <= b}.

    Gaussian: b = 1, a = K at ||t|| = 1. Epanechnikov: b = 1/2, a = K(1/2).
    """
    kind = KernelKind(kind)
    if kind is KernelKind.GAUSSIAN:
        if dimension < 1:
            raise ValueError("dimension must be a positive integer")
        a = (2.0 * math.pi) ** (-dimension / 2.0) * math.exp(-0.5)
        return a, 1.0
    if dimension != 1:
        raise ValueError("the Epanechnikov kernel is only provided for d=1")
    return 0.75 * (1.0 - 0.25), 0.5
