"""Acceptance testing: abstain unless the variance test passes.

The rule accepts the regression output at x only if (1) the estimated
covariate density clears the floor 4a / (n h^d), so the point counts as
explored, and (2) the one-sided test on the conditional variance passes:

    sigma2_hat(x) <= lambda * (1 - z_{1-beta} * ||K||_2 * sqrt(2 / (n h^d p_hat(x))))

The estimated density stands in for the true one on the right-hand side.
Setting beta = 0.5 makes z vanish and the rule degenerates to the plugin
baseline: accept iff the density gate holds and sigma2_hat <= lambda.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .estimators import FitState, PointEvaluation, evaluate_point
from .normal import normal_quantile


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"


class Reason(enum.Enum):
    ACCEPTED = "accepted"
    LOW_DENSITY = "low_density"
    VARIANCE_TEST_FAILED = "variance_test_failed"


@dataclass(frozen=True)
class AbstentionConfig:
    """Abstention cost lam > 0 and test significance level beta in (0, 0.5].

    beta is capped at 0.5: beyond it the test would be anti-conservative
    relative to the plugin rule.
    """

    lam: float
    beta: float

    def __post_init__(self):
        if not (self.lam > 0.0):
            raise ValueError("abstention cost must be positive")
        if not (0.0 < self.beta <= 0.5):
            raise ValueError("significance level must lie in (0, 0.5]")


@dataclass(frozen=True)
class Decision:
    """Accept/reject verdict with the quantities that produced it."""

    verdict: Verdict
    reason: Reason
    eval: PointEvaluation
    threshold: float

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPT


def density_floor(fit: FitState) -> float:
    """Minimum estimated density 4a / (n h^d) required to run the test."""
    return 4.0 * fit.kernel.a / (fit.train.n * fit.h ** fit.train.d)


def variance_threshold(lam: float, z: float, l2_norm: float, n: int,
                       h: float, d: int, p_hat: float) -> float:
    """Right-hand side of the variance test; NaN when p_hat is zero."""
    if p_hat <= 0.0:
        return float("nan")
    return lam * (1.0 - z * l2_norm * math.sqrt(2.0 / (n * h ** d * p_hat)))


def decide_from_evaluation(ev: PointEvaluation, fit: FitState, lam: float,
                           z: float) -> Decision:
    """Apply the gate and the variance test to an existing point evaluation.

    Lets sweeps over (lam, z) reuse one evaluation per query point. A zero
    kernel mass shows up as p_hat = 0 and is rejected by the gate. lam = 0
    is allowed here (threshold 0; only an exactly-zero variance estimate
    could be accepted) for the coverage sweep's leftmost cell.
    """
    n, h, d = fit.train.n, fit.h, fit.train.d
    threshold = variance_threshold(lam, z, fit.kernel.l2_norm, n, h, d, ev.p_hat)
    if ev.p_hat < density_floor(fit):
        return Decision(Verdict.REJECT, Reason.LOW_DENSITY, ev, threshold)
    # A non-positive threshold cannot be met (sigma2_hat >= 0), so points
    # with too little density mass are rejected whatever the variance says.
    if ev.sigma2_hat <= threshold:
        return Decision(Verdict.ACCEPT, Reason.ACCEPTED, ev, threshold)
    return Decision(Verdict.REJECT, Reason.VARIANCE_TEST_FAILED, ev, threshold)


def decide_with_z(fit: FitState, x, lam: float, z: float) -> Decision:
    """Decision rule with the critical value z = z_{1-beta} given directly.

    Exposed separately because high-dimensional runs sweep z itself instead
    of beta.
    """
    return decide_from_evaluation(evaluate_point(fit, x), fit, lam, z)


def decide(fit: FitState, x, cfg: AbstentionConfig) -> Decision:
    """Run the acceptance test at x under cfg."""
    return decide_with_z(fit, x, cfg.lam, normal_quantile(1.0 - cfg.beta))


def plugin_decide(fit: FitState, x, lam: float) -> Decision:
    """The plugin baseline: the beta = 0.5 instance of the test."""
    return decide(fit, x, AbstentionConfig(lam=lam, beta=0.5))
