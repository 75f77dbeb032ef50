"""Acceptance criteria, one test per criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass line per
criterion. Each test enforces its wall-clock budget.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import sys
import time
from contextlib import contextmanager
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

import envforge.cli as cli
from envforge.calibration.wald import Degenerate, SolveTrial, wald_test
from envforge.core import ErrorKind, InstanceParams, Response, verify
from envforge.core.native import GridPathEnv, create_native, grid_min_cost
from envforge.dataset.build import (
    DatasetConfig,
    build_dataset,
    load_records,
    rebuild_dataset,
)
from envforge.diversity import (
    ClusterAssignment,
    cluster,
    entropy_curve,
    pairwise_cosine_distances,
    shannon_entropy,
)
from envforge.protocol import ProtocolEnvironment, SandboxPolicy
from envforge.registry import native_ref
from envforge.rewards import RewardBreakdown, score_response
from envforge.synthesis import JudgeStage, judge_pass_rule
from envforge.workspace import hash_workspace

from conftest import REFERENCE_GRID, REFERENCE_GRID_COST, runner_cmd


@contextmanager
def budget(name: str, seconds: float):
    start = time.monotonic()
    yield
    elapsed = time.monotonic() - start
    assert elapsed < seconds, f"{name} exceeded its {seconds}s budget ({elapsed:.1f}s)"
    print(f"ACCEPTANCE PASS: {name} ({elapsed:.2f}s)")


def test_fig2_golden_oracle() -> None:
    with budget("Fig. 2 golden oracle", 1.0):
        # Independent oracle: enumerate all monotone paths.
        n = len(REFERENCE_GRID)
        best = None
        for downs in combinations(range(2 * (n - 1)), n - 1):
            i = j = 0
            total = REFERENCE_GRID[0][0]
            for step in range(2 * (n - 1)):
                if step in downs:
                    i += 1
                else:
                    j += 1
                total += REFERENCE_GRID[i][j]
            best = total if best is None else min(best, total)
        assert best == REFERENCE_GRID_COST
        assert grid_min_cost(REFERENCE_GRID) == best

        env = GridPathEnv()
        instance = InstanceParams(
            env_id=env.env_id, difficulty=2, seed=0,
            payload={"grid": REFERENCE_GRID, "size": 4},
        )
        assert verify(env, instance, Response(f"<answer>{best}</answer>")).reward == 1
        for wrong in range(0, 60):
            if wrong == best:
                continue
            verdict = verify(env, instance, Response(f"<answer>{wrong}</answer>"))
            assert verdict.reward == 0


def test_reward_product_law() -> None:
    with budget("Reward product law", 5.0):
        observed = set()
        env = GridPathEnv()
        instance = InstanceParams(
            env_id=env.env_id, difficulty=2, seed=0,
            payload={"grid": REFERENCE_GRID, "size": 4},
        )
        cases = {
            f"<think>t</think><answer>{REFERENCE_GRID_COST}</answer>": (1, 1),
            "<think>t</think><answer>999</answer>": (1, 0),
            f"answer is {REFERENCE_GRID_COST}": (0, 0),
            f"<answer>{REFERENCE_GRID_COST}</answer>": (0, 0),  # think block missing
        }
        for text, expected in cases.items():
            breakdown = score_response(env, instance, Response(text))
            assert (breakdown.format_score, breakdown.answer_score) == expected
            assert breakdown.total == breakdown.format_score * breakdown.answer_score
            observed.add(expected)
        assert observed == {(1, 1), (1, 0), (0, 0)}  # (0,1) is unreachable by design
        with pytest.raises(ValueError):
            RewardBreakdown(format_score=1, answer_score=1, total=0)  # violates the product
        assert RewardBreakdown(format_score=0, answer_score=1, total=0).total == 0
        # Untagged responses are always 0.
        rng = random.Random(0)
        for _ in range(100):
            junk = "".join(rng.choice("abc123 \n") for _ in range(40))
            assert score_response(env, instance, Response(junk)).total == 0


def test_verifier_error_footnote_semantics() -> None:
    with budget("Footnote semantics under hostile runners", 120.0):
        hostile = ["runner_hang.py", "runner_crash.py", "runner_flood.py", "runner_error_reply.py"]
        policy = SandboxPolicy(
            wall_clock_timeout=5.0,
            max_output=256 * 1024,
            op_timeouts={"generate": 5.0, "observe": 2.0, "verify": 1.0, "shutdown": 0.5},
        )
        instance = InstanceParams(
            env_id="adversary", difficulty=1, seed=0, payload={"grid": [[1]], "size": 1}
        )
        probe = GridPathEnv()
        failures = 0
        for name in hostile:
            env = ProtocolEnvironment("adversary", runner_cmd(name), policy=policy)
            try:
                verdict = env.verify(instance, Response("<answer>1</answer>"))
                assert verdict.reward == 0, name
                assert verdict.errored, name
                assert verdict.error_kind in (
                    ErrorKind.TIMEOUT,
                    ErrorKind.RUNNER_ERROR,
                    ErrorKind.RESOURCE_LIMIT,
                ), name
            finally:
                env.close()
            # Liveness probe: the engine still verifies normally afterwards.
            live = probe.verify(
                InstanceParams(env_id=probe.env_id, difficulty=1, seed=0,
                               payload={"grid": [[2]], "size": 1}),
                Response("<answer>2</answer>"),
            )
            assert live.reward == 1
            failures += 1
        assert failures == len(hostile)  # 100% of fixtures contained


def test_wald_calibration_against_reference_oracle() -> None:
    with budget("Wald calibration", 10.0):
        rng = random.Random(20260808)
        probs = {1: 0.9, 2: 0.7, 3: 0.5, 4: 0.3, 5: 0.1}
        trials = []
        for difficulty in range(1, 6):
            for i in range(16):
                trials.append(
                    SolveTrial("fixture", difficulty, i, rng.random() < probs[difficulty])
                )
        result = wald_test(trials)
        assert result.reject_null  # keep decision
        # Reference oracle (statsmodels Logit) values, frozen and recomputed.
        assert result.beta_hat == pytest.approx(-0.9233702892525938, abs=1e-6)
        assert result.std_err == pytest.approx(0.21602368311041378, abs=1e-6)
        assert result.p_value == pytest.approx(9.58290201327285e-06, abs=1e-6)
        try:
            import statsmodels.api as sm

            x = np.array([t.difficulty for t in trials], dtype=float)
            y = np.array([1.0 if t.correct else 0.0 for t in trials])
            fit = sm.Logit(y, sm.add_constant(x)).fit(disp=0, method="newton", tol=1e-12)
            assert result.beta_hat == pytest.approx(float(fit.params[1]), abs=1e-6)
            assert result.std_err == pytest.approx(float(fit.bse[1]), abs=1e-6)
        except ImportError:
            pass  # frozen constants above still pin the oracle values

        flat_correct = [SolveTrial("t", d, i, True) for d in range(1, 6) for i in range(16)]
        all_correct = wald_test(flat_correct)
        assert all_correct.degenerate is Degenerate.ALL_CORRECT and not all_correct.reject_null
        flat_wrong = [SolveTrial("t", d, i, False) for d in range(1, 6) for i in range(16)]
        all_wrong = wald_test(flat_wrong)
        assert all_wrong.degenerate is Degenerate.ALL_INCORRECT and not all_wrong.reject_null


@pytest.mark.parametrize("env_count,per_env", [(400, 40), (100, 160), (25, 640)])
def test_dataset_scales(tmp_path: Path, env_count: int, per_env: int) -> None:
    with budget(f"Dataset scale ({env_count}, {per_env})", 300.0):
        pool = [
            (native_ref("grid_path_cost", f"grid-{i:04d}"),
             create_native("grid_path_cost", env_id=f"grid-{i:04d}"))
            for i in range(env_count)
        ]
        config = DatasetConfig(
            env_count=env_count, per_env=per_env, dataset_seed=404, name=f"scale-{env_count}"
        )
        out = tmp_path / f"ds-{env_count}"
        manifest = build_dataset(config, pool, out)
        assert manifest.record_count == 16000
        per_level = manifest.per_level_counts
        assert all(per_level[level] == 16000 // 5 for level in range(1, 6))
        records = load_records(out)
        assert len(records) == 16000
        by_env: dict[str, dict[int, int]] = {}
        for record in records:
            counts = by_env.setdefault(record.env_id, {})
            counts[record.difficulty] = counts.get(record.difficulty, 0) + 1
        assert len(by_env) == env_count
        expected_level = per_env // 5
        for counts in by_env.values():
            assert counts == {level: expected_level for level in range(1, 6)}

        original = (out / "records.jsonl").read_bytes()
        (out / "records.jsonl").unlink()
        by_ref = dict(pool)
        rebuild_dataset(manifest, lambda ref: by_ref[ref], out)
        assert (out / "records.jsonl").read_bytes() == original


def test_entropy_properties() -> None:
    with budget("Entropy properties", 60.0):
        assert shannon_entropy(ClusterAssignment(labels=(0, 0, 0), sizes=(3,))) == 0.0
        four = ClusterAssignment(labels=(0, 1, 2, 3), sizes=(1, 1, 1, 1))
        assert shannon_entropy(four) == pytest.approx(2.0, abs=1e-12)

        rng = random.Random(515)

        def embeddings(n: int, dim: int = 6) -> np.ndarray:
            matrix = np.array([[rng.gauss(0, 1) for _ in range(dim)] for _ in range(n)])
            return matrix / np.linalg.norm(matrix, axis=1)[:, None]

        taus = [i / 19 * 2.0 for i in range(20)]
        for _ in range(100):
            matrix = embeddings(rng.randint(2, 50))
            points = entropy_curve(matrix, taus)
            upper = math.log2(matrix.shape[0])
            for point in points:
                assert 0.0 <= point.entropy_bits <= upper + 1e-12
            values = [p.entropy_bits for p in points]
            assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

        # Threshold cut equals a dendrogram cut (naive agglomerative oracle).
        for _ in range(10):
            matrix = embeddings(rng.randint(2, 50), dim=4)
            distances = pairwise_cosine_distances(matrix)
            tau = rng.uniform(0.05, 1.5)
            assignment = cluster(matrix, tau)
            groups: dict[int, set[int]] = {}
            for index, label in enumerate(assignment.labels):
                groups.setdefault(label, set()).add(index)
            mine = {frozenset(g) for g in groups.values()}

            clusters = [{i} for i in range(distances.shape[0])]
            while len(clusters) > 1:
                best = None
                for a in range(len(clusters)):
                    for b in range(a + 1, len(clusters)):
                        d = min(distances[i, j] for i in clusters[a] for j in clusters[b])
                        if best is None or d < best[0]:
                            best = (d, a, b)
                if best is None or best[0] >= tau:
                    break
                _, a, b = best
                clusters[a] |= clusters[b]
                del clusters[b]
            assert mine == {frozenset(g) for g in clusters}


def test_judge_rule_soundness() -> None:
    with budget("Judge-rule soundness", 5.0):
        names = (
            "reference_free",
            "computational_advantage",
            "implementation_complete",
            "difficulty_scales",
            "well_specified",
            "loophole_free",
        )
        for combo in itertools.product([False, True], repeat=6):
            flags = dict(zip(names, combo))
            stage1_expected = (
                (flags["reference_free"] or flags["computational_advantage"])
                and flags["implementation_complete"]
                and flags["difficulty_scales"]
            )
            stage2_expected = flags["well_specified"] and flags["loophole_free"]
            assert judge_pass_rule(JudgeStage.CODE_REVIEW, flags) == stage1_expected
            assert judge_pass_rule(JudgeStage.QUESTION_REVIEW, flags) == stage2_expected


def test_end_to_end_determinism(tmp_path: Path) -> None:
    with budget("End-to-end determinism", 300.0):
        def run(base: Path) -> str:
            base.mkdir(parents=True, exist_ok=True)
            config = {
                "workspace": str(base / "ws"),
                "seed": 7,
                "runner_command": [sys.executable, "{bundle}"],
                "provider": {"kind": "mock"},
                "sandbox": {"wall_clock_timeout": 10.0},
                "synthesis": {"attempts": 2, "probes_per_level": 1, "keywords": ["Grid"]},
                "calibration": {"samples_per_level": 16},
                "dataset": {"name": "fixture", "env_count": 2, "per_env": 20, "val_total": 25},
                "entropy": {"sample_size": 12, "batch_size": 6, "embedding_dim": 64},
            }
            path = base / "config.json"
            path.write_text(json.dumps(config))
            assert cli.main(["run", "--stage", "all", "--config", str(path)]) == 0
            report = json.loads((base / "ws" / "report.json").read_text())
            assert report["status_counts"]["accepted"] >= 1
            assert (base / "ws" / "datasets" / "fixture" / "records.jsonl").exists()
            return hash_workspace(base / "ws")

        assert run(tmp_path / "runA") == run(tmp_path / "runB")
