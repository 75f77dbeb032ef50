"""One-sided Wald test for difficulty control.

Fits a per-trial logistic regression of success on difficulty by maximum
likelihood (Newton/IRLS, tolerance 1e-10, at most 100 iterations) and rejects
the null when the slope is significantly negative. Environments whose
outcomes are constant or (quasi-)separated have no finite MLE; those are
degenerate results and are never rejected — they correspond to the trivial
and impossible environments the calibration stage removes.

An ordinary-least-squares variant over the five per-level rates is available
behind ``method="ols_rates"`` for comparison.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_ITER = 100
TOL = 1e-10


class Degenerate(str, enum.Enum):
    NONE = "none"
    ALL_CORRECT = "all_correct"
    ALL_INCORRECT = "all_incorrect"
    SEPARATION = "separation"


@dataclass(frozen=True)
class SolveTrial:
    env_id: str
    difficulty: int
    instance_seed: int
    correct: bool


@dataclass(frozen=True)
class WaldTestResult:
    beta_hat: float
    std_err: float
    z: float
    p_value: float
    reject_null: bool
    degenerate: Degenerate
    alpha: float
    intercept: float
    n_trials: int
    converged: bool
    method: str = "logistic"


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def wald_test(
    trials: Sequence[SolveTrial], alpha: float = 0.05, method: str = "logistic"
) -> WaldTestResult:
    """Test for a significant negative success/difficulty slope."""
    if method not in ("logistic", "ols_rates"):
        raise ValueError(f"unknown method {method!r}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not trials:
        raise ValueError("no trials given")
    x = np.array([t.difficulty for t in trials], dtype=float)
    y = np.array([1.0 if t.correct else 0.0 for t in trials])
    if len(set(x.tolist())) < 2:
        raise ValueError("trials must span at least 2 distinct difficulty levels")

    degenerate = _detect_degenerate(x, y)
    if degenerate is not Degenerate.NONE:
        return WaldTestResult(
            beta_hat=float("nan"),
            std_err=float("nan"),
            z=float("nan"),
            p_value=1.0,
            reject_null=False,
            degenerate=degenerate,
            alpha=alpha,
            intercept=float("nan"),
            n_trials=len(trials),
            converged=False,
            method=method,
        )

    if method == "logistic":
        intercept, beta, std_err, converged = _logistic_fit(x, y)
    else:
        intercept, beta, std_err, converged = _ols_rates_fit(x, y)

    z = beta / std_err
    p_value = normal_cdf(z)  # one-sided: H1 is beta < 0
    reject = beta < 0 and p_value < alpha
    return WaldTestResult(
        beta_hat=beta,
        std_err=std_err,
        z=z,
        p_value=p_value,
        reject_null=reject,
        degenerate=Degenerate.NONE,
        alpha=alpha,
        intercept=intercept,
        n_trials=len(trials),
        converged=converged,
        method=method,
    )


def _detect_degenerate(x: np.ndarray, y: np.ndarray) -> Degenerate:
    if y.min() == 1.0:
        return Degenerate.ALL_CORRECT
    if y.max() == 0.0:
        return Degenerate.ALL_INCORRECT
    # The 1-D logistic MLE exists iff the difficulty ranges of successes and
    # failures properly overlap; touching or disjoint ranges are (quasi-)
    # separation and the likelihood has no finite maximizer.
    x_success, x_failure = x[y == 1.0], x[y == 0.0]
    if x_success.max() <= x_failure.min() or x_failure.max() <= x_success.min():
        return Degenerate.SEPARATION
    return Degenerate.NONE


def _logistic_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, bool]:
    design = np.column_stack([np.ones_like(x), x])
    beta = np.zeros(2)
    converged = False
    for _ in range(MAX_ITER):
        eta = design @ beta
        mu = _expit(eta)
        weights = mu * (1.0 - mu)
        info = design.T @ (design * weights[:, None])
        gradient = design.T @ (y - mu)
        delta = np.linalg.solve(info, gradient)
        beta = beta + delta
        if np.max(np.abs(delta)) < TOL:
            converged = True
            break
    eta = design @ beta
    mu = _expit(eta)
    weights = mu * (1.0 - mu)
    info = design.T @ (design * weights[:, None])
    cov = np.linalg.inv(info)
    return float(beta[0]), float(beta[1]), float(math.sqrt(cov[1, 1])), converged


def _expit(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    positive = eta >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-eta[positive]))
    exp_eta = np.exp(eta[~positive])
    out[~positive] = exp_eta / (1.0 + exp_eta)
    return out


def _ols_rates_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, bool]:
    """Slope of per-level rates under OLS; comparison flag only."""
    levels = np.array(sorted(set(x.tolist())))
    rates = np.array([y[x == level].mean() for level in levels])
    design = np.column_stack([np.ones_like(levels), levels])
    coef, *_ = np.linalg.lstsq(design, rates, rcond=None)
    residuals = rates - design @ coef
    dof = max(len(levels) - 2, 1)
    sigma2 = float(residuals @ residuals) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return float(coef[0]), float(coef[1]), float(math.sqrt(cov[1, 1])), True
