"""Stage-5 calibration: solve environments with an LLM and filter by the
accuracy/difficulty correlation.

An environment is kept only when its difficulty parameter demonstrably
controls hardness (Wald rejection); flat or impossible environments are
discarded; trial shortfalls leave the decision inconclusive and re-runnable.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from ..core.ops import render_observation, sample_instances, verify
from ..core.serialization import stable_u64
from ..core.types import DIFFICULTY_LEVELS, EnvironmentInterface, Response
from ..rewards.scoring import attach_prompt_prefix
from ..synthesis.providers import LlmProvider, ProviderError, SamplingParams, provider_call
from .wald import SolveTrial, WaldTestResult, wald_test

MIN_COMPLETION = 0.8  # calibration requires >= 80% of planned trials


@dataclass(frozen=True)
class CurvePoint:
    difficulty: int
    trials: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0


@dataclass(frozen=True)
class CalibrationReport:
    env_id: str
    curve: tuple[CurvePoint, ...]
    test: WaldTestResult | None
    decision: str  # keep | discard | inconclusive
    planned_trials: int
    completed_trials: int
    samples_per_level: int
    alpha: float
    provider_failures: int = 0

    def to_obj(self) -> dict:
        test_obj = None
        if self.test is not None:
            test_obj = {
                "alpha": self.test.alpha,
                "beta_hat": _nan_safe(self.test.beta_hat),
                "converged": self.test.converged,
                "degenerate": self.test.degenerate.value,
                "intercept": _nan_safe(self.test.intercept),
                "method": self.test.method,
                "n_trials": self.test.n_trials,
                "p_value": self.test.p_value,
                "reject_null": self.test.reject_null,
                "std_err": _nan_safe(self.test.std_err),
                "z": _nan_safe(self.test.z),
            }
        return {
            "alpha": self.alpha,
            "completed_trials": self.completed_trials,
            "provider_failures": self.provider_failures,
            "curve": [
                {"difficulty": p.difficulty, "rate": p.rate, "successes": p.successes, "trials": p.trials}
                for p in self.curve
            ],
            "decision": self.decision,
            "env_id": self.env_id,
            "planned_trials": self.planned_trials,
            "samples_per_level": self.samples_per_level,
            "test": test_obj,
        }


def _nan_safe(value: float) -> float | None:
    return None if value != value else value


def solve_environment(
    env: EnvironmentInterface,
    provider: LlmProvider,
    samples_per_level: int,
    seed: int = 0,
    params: SamplingParams | None = None,
    audit=None,
) -> tuple[list[SolveTrial], int, int]:
    """Returns (trials, planned, provider_failures).

    Every response is scored through the environment verifier; errored
    verdicts count as incorrect. Provider failures shrink the trial list and
    are surfaced in the failure count.
    """
    if samples_per_level < 1:
        raise ValueError("samples_per_level must be >= 1")
    params = params or SamplingParams()
    planned = len(DIFFICULTY_LEVELS) * samples_per_level
    trials: list[SolveTrial] = []
    failures = 0
    for difficulty in DIFFICULTY_LEVELS:
        base_seed = stable_u64("calibration", env.env_id, difficulty, seed)
        instances = sample_instances(env, difficulty, samples_per_level, base_seed)
        for instance in instances:
            observation = render_observation(env, instance)
            prompt = attach_prompt_prefix(observation)
            try:
                text = provider_call(
                    provider, prompt, params, audit=audit, stage="calibrate", keyword=env.env_id
                )
            except ProviderError:
                failures += 1
                continue
            verdict = verify(env, instance, Response(text))
            trials.append(
                SolveTrial(
                    env_id=env.env_id,
                    difficulty=difficulty,
                    instance_seed=instance.seed,
                    correct=verdict.reward == 1,
                )
            )
    return trials, planned, failures


def build_curve(trials: Sequence[SolveTrial]) -> tuple[CurvePoint, ...]:
    points = []
    for difficulty in DIFFICULTY_LEVELS:
        level_trials = [t for t in trials if t.difficulty == difficulty]
        points.append(
            CurvePoint(
                difficulty=difficulty,
                trials=len(level_trials),
                successes=sum(t.correct for t in level_trials),
            )
        )
    return tuple(points)


def calibrate(
    env: EnvironmentInterface,
    provider: LlmProvider,
    samples_per_level: int = 16,
    alpha: float = 0.05,
    seed: int = 0,
    method: str = "logistic",
    params: SamplingParams | None = None,
    audit=None,
) -> CalibrationReport:
    trials, planned, failures = solve_environment(
        env, provider, samples_per_level, seed=seed, params=params, audit=audit
    )
    curve = build_curve(trials)
    if len(trials) < MIN_COMPLETION * planned:
        return CalibrationReport(
            env_id=env.env_id,
            curve=curve,
            test=None,
            decision="inconclusive",
            planned_trials=planned,
            completed_trials=len(trials),
            samples_per_level=samples_per_level,
            alpha=alpha,
            provider_failures=failures,
        )
    test = wald_test(trials, alpha=alpha, method=method)
    return CalibrationReport(
        env_id=env.env_id,
        curve=curve,
        test=test,
        decision="keep" if test.reject_null else "discard",
        planned_trials=planned,
        completed_trials=len(trials),
        samples_per_level=samples_per_level,
        alpha=alpha,
        provider_failures=failures,
    )


def curve_to_csv(report: CalibrationReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["difficulty", "trials", "successes", "rate"])
    for point in report.curve:
        writer.writerow([point.difficulty, point.trials, point.successes, f"{point.rate:.6f}"])
    return buffer.getvalue()
