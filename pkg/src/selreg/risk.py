"""Chow risk, oracle risk and the excess-risk decomposition.

On a known synthetic truth the conditional Chow risk of an accepted
prediction has the closed form sigma^2(x) + (f_hat(x) - f(x))^2, so no test
labels need to be sampled. The pointwise excess then decomposes exactly as

    (f_hat - f)^2 * 1{accept} + |sigma^2 - lambda| * 1{verdict != oracle}

and Monte Carlo only averages over replicated training sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .abstention import AbstentionConfig, Verdict, decide
from .data import derive_seed
from .estimators import Dataset, FitState


@dataclass(frozen=True)
class GroundTruth:
    """True mean and noise-scale functions of a synthetic data model.

    Both callables follow the data-module contract: 1-D problems receive the
    bare coordinate, higher-dimensional ones the point vector (last axis).
    """

    mean_fn: Callable
    sd_fn: Callable

    def _at(self, fn: Callable, x) -> float:
        x = np.asarray(x, dtype=float)
        arg = float(x.reshape(-1)[0]) if x.size == 1 else x.reshape(-1)
        return float(fn(arg))

    def mean_at(self, x) -> float:
        return self._at(self.mean_fn, x)

    def sd_at(self, x) -> float:
        return self._at(self.sd_fn, x)

    def variance_at(self, x) -> float:
        return self.sd_at(x) ** 2


@dataclass(frozen=True)
class RiskReport:
    """Monte-Carlo excess-risk summary at one grid point."""

    x: np.ndarray
    expected_excess: float
    accept_fraction: float
    mc_stderr: float
    replicates: int


def oracle_risk(sigma2: float, lam: float) -> float:
    """Risk of the oracle rule: min(sigma2, lam)."""
    if sigma2 < 0.0:
        raise ValueError("variance must be nonnegative")
    if not (lam > 0.0):
        raise ValueError("abstention cost must be positive")
    return min(sigma2, lam)


def oracle_abstains(sigma2: float, lam: float) -> bool:
    """The optimal abstention rule: abstain iff sigma2 >= lam."""
    return sigma2 >= lam


def conditional_chow_risk(f_hat: float, truth: GroundTruth, x, lam: float,
                          verdict: Verdict) -> float:
    """Chow risk at x conditional on the fitted estimate and verdict.

    Rejection pays lam; acceptance pays the exact conditional expectation
    of the squared error, sigma^2(x) + (f_hat - f(x))^2.
    """
    if verdict is Verdict.REJECT:
        return lam
    return truth.variance_at(x) + (f_hat - truth.mean_at(x)) ** 2


def pointwise_excess(f_hat: float, truth: GroundTruth, x, lam: float,
                     verdict: Verdict) -> float:
    """Excess over the oracle risk: estimation error plus decision mismatch."""
    sigma2 = truth.variance_at(x)
    delta = abs(sigma2 - lam)
    wrong_call = (verdict is Verdict.REJECT) != oracle_abstains(sigma2, lam)
    excess = delta if wrong_call else 0.0
    if verdict is Verdict.ACCEPT:
        excess += (f_hat - truth.mean_at(x)) ** 2
    return excess


def monte_carlo_expected_excess(
    truth: GroundTruth,
    sampler: Callable[[int, int], Dataset],
    n: int,
    cfg: AbstentionConfig,
    fit_rule: Callable[[Dataset], FitState],
    x_grid,
    replicates: int,
    seed: int,
) -> list[RiskReport]:
    """Average the pointwise excess over freshly drawn training sets.

    Each replicate r draws sampler(n, derive_seed(seed, r)), fits via
    fit_rule, and scores every grid point. Replicates are aggregated in
    index order, so results do not depend on scheduling; the whole run is
    a pure function of (inputs, seed).
    """
    if replicates < 1:
        raise ValueError("need at least one replicate")
    x_grid = [np.atleast_1d(np.asarray(x, dtype=float)) for x in x_grid]
    if not x_grid:
        raise ValueError("x_grid must be nonempty")

    excess = np.zeros((len(x_grid), replicates))
    accepted = np.zeros((len(x_grid), replicates), dtype=bool)
    for r in range(replicates):
        ds = sampler(n, derive_seed(seed, r))
        fit = fit_rule(ds)
        for i, x in enumerate(x_grid):
            decision = decide(fit, x, cfg)
            accepted[i, r] = decision.verdict is Verdict.ACCEPT
            excess[i, r] = pointwise_excess(decision.eval.f_hat, truth, x,
                                            cfg.lam, decision.verdict)

    reports = []
    for i, x in enumerate(x_grid):
        row = excess[i]
        stderr = (float(row.std(ddof=1)) / math.sqrt(replicates)
                  if replicates > 1 else 0.0)
        reports.append(RiskReport(
            x=x,
            expected_excess=float(row.mean()),
            accept_fraction=float(accepted[i].mean()),
            mc_stderr=stderr,
            replicates=replicates,
        ))
    return reports
