"""Grid environment against the brute-force path-enumeration oracle."""

from __future__ import annotations

import random
from itertools import combinations

import pytest

from envforge.core import (
    ErrorKind,
    InstanceParams,
    Response,
    render_observation,
    sample_instances,
    verify,
)
from envforge.core.native import GridPathEnv, grid_min_cost

from conftest import REFERENCE_GRID, REFERENCE_GRID_COST


def enumerate_min_cost(grid: list[list[int]]) -> int:
    """Independent oracle: exhaustive enumeration of all monotone paths."""
    n = len(grid)
    best: int | None = None
    for downs in combinations(range(2 * (n - 1)), n - 1):
        i = j = 0
        total = grid[0][0]
        for step in range(2 * (n - 1)):
            if step in downs:
                i += 1
            else:
                j += 1
            total += grid[i][j]
        best = total if best is None else min(best, total)
    assert best is not None
    return best


def make_instance(grid: list[list[int]], difficulty: int = 2) -> InstanceParams:
    return InstanceParams(
        env_id="grid_path_cost",
        difficulty=difficulty,
        seed=0,
        payload={"grid": grid, "size": len(grid)},
    )


def test_single_cell_grid() -> None:
    assert grid_min_cost([[5]]) == 5


def test_two_by_two_grid() -> None:
    assert grid_min_cost([[1, 2], [3, 1]]) == 4  # 1+2+1 beats 1+3+1


def test_reference_grid_cost_matches_enumeration() -> None:
    assert enumerate_min_cost(REFERENCE_GRID) == REFERENCE_GRID_COST
    assert grid_min_cost(REFERENCE_GRID) == REFERENCE_GRID_COST


def test_oracle_equivalence_on_random_grids() -> None:
    rng = random.Random(12345)
    for _ in range(1000):
        n = rng.randint(1, 4)
        grid = [[rng.randint(1, 9) for _ in range(n)] for _ in range(n)]
        assert grid_min_cost(grid) == enumerate_min_cost(grid)


@pytest.mark.parametrize(
    "bad",
    [[], [[1, 2]], [[1, 2], [3]], [[0, 1], [1, 1]], [[1, -2], [3, 1]]],
)
def test_invalid_grids_rejected(bad) -> None:
    with pytest.raises(ValueError):
        grid_min_cost(bad)


def test_sampling_is_deterministic_and_scales_with_difficulty() -> None:
    env = GridPathEnv()
    first = sample_instances(env, 2, 1, 42)
    again = sample_instances(env, 2, 1, 42)
    assert [i.to_json() for i in first] == [i.to_json() for i in again]
    inst = first[0]
    assert inst.payload["size"] == 4  # size = difficulty + 2
    assert len(inst.payload["grid"]) == 4
    assert all(1 <= v <= 9 for row in inst.payload["grid"] for v in row)
    for difficulty in (1, 3, 5):
        got = sample_instances(env, difficulty, 1, 7)[0]
        assert got.payload["size"] == difficulty + 2


def test_sample_batch_distinct_and_repeatable() -> None:
    env = GridPathEnv()
    batch = sample_instances(env, 3, 5, 7)
    serialized = [i.to_json() for i in batch]
    assert len(set(serialized)) == 5
    assert serialized == [i.to_json() for i in sample_instances(env, 3, 5, 7)]
    assert all(i.payload["size"] == 5 for i in batch)


def test_empty_request_rejected() -> None:
    env = GridPathEnv()
    with pytest.raises(ValueError):
        sample_instances(env, 1, 0, 0)


def test_observation_embeds_grid_and_movement_rule() -> None:
    env = GridPathEnv()
    obs = render_observation(env, make_instance(REFERENCE_GRID))
    for row in REFERENCE_GRID:
        assert " ".join(str(v) for v in row) in obs.question_text
    assert "only right/down moves" in obs.question_text
    assert obs.answer_format_hint == "<answer>NUMBER</answer>"
    again = render_observation(env, make_instance(REFERENCE_GRID))
    assert again.question_text == obs.question_text


def test_degenerate_single_cell_render() -> None:
    env = GridPathEnv()
    obs = render_observation(env, make_instance([[5]], difficulty=1))
    assert "5" in obs.question_text
    assert obs.answer_format_hint


def test_env_id_mismatch_rejected() -> None:
    env = GridPathEnv()
    foreign = InstanceParams(env_id="other", difficulty=1, seed=0, payload={"grid": [[1]], "size": 1})
    with pytest.raises(ValueError):
        render_observation(env, foreign)
    with pytest.raises(ValueError):
        verify(env, foreign, Response("x"))


def test_verify_reference_answers() -> None:
    env = GridPathEnv()
    inst = make_instance(REFERENCE_GRID)
    good = verify(env, inst, Response(f"<answer>{REFERENCE_GRID_COST}</answer>"))
    assert good.reward == 1 and not good.errored

    wrong = verify(env, inst, Response("<answer>23</answer>"))
    assert wrong.reward == 0 and not wrong.errored

    untagged = verify(env, inst, Response("the answer is 24"))
    assert untagged.reward == 0
    assert untagged.errored
    assert untagged.error_kind is ErrorKind.EXTRACTION_FAILED


def test_verify_non_numeric_answer_is_extraction_failure() -> None:
    env = GridPathEnv()
    inst = make_instance(REFERENCE_GRID)
    got = verify(env, inst, Response("<answer>twenty-four</answer>"))
    assert got.error_kind is ErrorKind.EXTRACTION_FAILED


def test_verify_total_under_fuzzed_responses() -> None:
    env = GridPathEnv()
    inst = make_instance(REFERENCE_GRID)
    rng = random.Random(99)
    alphabet = "<answer></answer>0123456789 \n\t\x00ü€abc"
    for _ in range(300):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 60)))
        verdict = verify(env, inst, Response(text))
        assert verdict.reward in (0, 1)
