"""Determinism, totality, and oracle-closure across all native environments."""

from __future__ import annotations

import random

import pytest

from envforge.core import Response, render_observation, sample_instances, verify
from envforge.core.extraction import extract_answer
from envforge.core.native import NATIVE_KINDS, create_native
from envforge.core.native.boolsat import clause_satisfied, parse_assignment
from envforge.core.native.ordering import IMPOSSIBLE, has_cycle, topological_order

ALL_KINDS = sorted(NATIVE_KINDS)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_sample_observe_verify_deterministic(kind: str) -> None:
    env = create_native(kind)
    for seed in (0, 7, 2**63):
        for difficulty in (1, 3, 5):
            a = sample_instances(env, difficulty, 3, seed)
            b = sample_instances(env, difficulty, 3, seed)
            assert [i.to_json() for i in a] == [i.to_json() for i in b]
            for inst in a:
                assert render_observation(env, inst) == render_observation(env, inst)
                oracle = Response(f"<answer>{env.oracle_answer(inst)}</answer>")
                first, second = verify(env, inst, oracle), verify(env, inst, oracle)
                # latency_ms is diagnostic; the semantic fields must repeat
                assert (first.reward, first.errored, first.error_kind) == (
                    second.reward,
                    second.errored,
                    second.error_kind,
                )


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_oracle_answer_earns_reward_one(kind: str) -> None:
    env = create_native(kind)
    for difficulty in (1, 2, 3, 4, 5):
        for inst in sample_instances(env, difficulty, 4, 11):
            verdict = verify(env, inst, Response(f"<answer>{env.oracle_answer(inst)}</answer>"))
            assert verdict.reward == 1, (kind, difficulty, inst.payload)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_verify_total_on_fuzzed_responses(kind: str) -> None:
    env = create_native(kind)
    inst = sample_instances(env, 2, 1, 5)[0]
    rng = random.Random(1234)
    alphabet = "<answer></answer>xT=F,123 IMPOSSIBLE\n\x00é"
    for _ in range(200):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 80)))
        verdict = verify(env, inst, Response(text))
        assert verdict.reward in (0, 1)


def test_alias_env_id_tags_instances() -> None:
    env = create_native("grid_path_cost", env_id="grid_path_cost-0042")
    inst = sample_instances(env, 1, 1, 0)[0]
    assert inst.env_id == "grid_path_cost-0042"
    assert verify(env, inst, Response(f"<answer>{env.oracle_answer(inst)}</answer>")).reward == 1


def test_extract_answer_rules() -> None:
    assert extract_answer("<answer>42</answer>") == "42"
    assert extract_answer("x <answer>1</answer> y <answer>2</answer>") == "2"
    assert extract_answer("x <answer>1</answer> y <answer>2</answer>", take="first") == "1"
    assert extract_answer("no tags here") is None
    assert extract_answer("<answer>multi\nline</answer>") == "multi\nline"
    with pytest.raises(ValueError):
        extract_answer("x", take="middle")


def test_topological_cycle_detection() -> None:
    tasks = ["T1", "T2", "T3"]
    assert not has_cycle(tasks, [["T1", "T2"], ["T2", "T3"]])
    assert has_cycle(tasks, [["T1", "T2"], ["T2", "T3"], ["T3", "T1"]])
    assert topological_order(tasks, [["T2", "T1"]]) == ["T2", "T1", "T3"]
    assert topological_order(tasks, [["T1", "T2"], ["T2", "T1"]]) is None


def test_topological_verifier_accepts_any_valid_ordering() -> None:
    env = create_native("topological_order")
    inst = sample_instances(env, 1, 1, 3)[0]
    tasks = inst.payload["tasks"]
    requires = inst.payload["requires"]
    assert not has_cycle(tasks, requires)
    valid = 0
    rng = random.Random(0)
    for _ in range(200):
        candidate = tasks[:]
        rng.shuffle(candidate)
        pos = {t: i for i, t in enumerate(candidate)}
        expected = all(pos[b] < pos[a] for b, a in requires)
        got = verify(env, inst, Response("<answer>" + ", ".join(candidate) + "</answer>"))
        assert got.reward == (1 if expected else 0)
        valid += got.reward
    assert valid > 0  # reference-free: more than one accepted output exists


def test_topological_impossible_instances() -> None:
    env = create_native("topological_order")
    cyclic = None
    for seed in range(200):
        for inst in sample_instances(env, 4, 4, seed):
            if has_cycle(inst.payload["tasks"], inst.payload["requires"]):
                cyclic = inst
                break
        if cyclic:
            break
    assert cyclic is not None, "generator never produced a cyclic instance"
    assert env.oracle_answer(cyclic) == IMPOSSIBLE
    assert verify(env, cyclic, Response(f"<answer>{IMPOSSIBLE}</answer>")).reward == 1
    tasks = cyclic.payload["tasks"]
    assert verify(env, cyclic, Response("<answer>" + ", ".join(tasks) + "</answer>")).reward == 0


def test_boolsat_assignment_parsing() -> None:
    assert parse_assignment("x1=T, x2=F", 2) == {1: True, 2: False}
    assert parse_assignment("x2=f x1=t", 2) == {1: True, 2: False}
    assert parse_assignment("x1=T", 2) is None  # incomplete
    assert parse_assignment("x1=T, x1=F", 1) is None  # duplicate
    assert parse_assignment("x3=T, x1=T, x2=T", 2) is None  # out of range


def test_boolsat_instances_satisfiable_and_checked() -> None:
    env = create_native("boolean_sat")
    for difficulty in (1, 3, 5):
        inst = sample_instances(env, difficulty, 1, 21)[0]
        clauses = inst.payload["clauses"]
        oracle = env.oracle_answer(inst)
        assignment = parse_assignment(oracle, inst.payload["num_vars"])
        assert assignment is not None
        assert all(clause_satisfied(c, assignment) for c in clauses)
        flipped = dict(assignment)
        flipped[1] = not flipped[1]
        if not all(clause_satisfied(c, flipped) for c in clauses):
            text = ", ".join(f"x{v}={'T' if flipped[v] else 'F'}" for v in sorted(flipped))
            assert verify(env, inst, Response(f"<answer>{text}</answer>")).reward == 0


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_question_embeds_every_payload_fact(kind: str) -> None:
    env = create_native(kind)
    inst = sample_instances(env, 2, 1, 17)[0]
    question = render_observation(env, inst).question_text
    if kind == "grid_path_cost":
        for row in inst.payload["grid"]:
            assert " ".join(map(str, row)) in question
    elif kind == "topological_order":
        for task in inst.payload["tasks"]:
            assert task in question
        for before, after in inst.payload["requires"]:
            assert f"{before} must run before {after}" in question
    else:
        assert f"x{inst.payload['num_vars']}" in question
        for clause in inst.payload["clauses"]:
            for lit in clause:
                assert f"x{abs(lit)}" in question
