"""Topological ordering with cycle detection.

Exercises reference-free verification: many orderings can be correct, so the
verifier checks constraint satisfaction instead of comparing to a reference.
Some higher-difficulty instances contain a cycle, where the only correct
answer is IMPOSSIBLE.
"""

from __future__ import annotations

import random
from typing import Any, Sequence

from ..extraction import extract_answer
from ..types import ErrorKind, InstanceParams, Observation
from .base import NativeEnvironment

IMPOSSIBLE = "IMPOSSIBLE"


def has_cycle(tasks: Sequence[str], requires: Sequence[Sequence[str]]) -> bool:
    """Kahn's algorithm: true when some task never reaches in-degree zero."""
    indegree = {t: 0 for t in tasks}
    children: dict[str, list[str]] = {t: [] for t in tasks}
    for before, after in requires:
        indegree[after] += 1
        children[before].append(after)
    ready = sorted(t for t, d in indegree.items() if d == 0)
    seen = 0
    while ready:
        node = ready.pop(0)
        seen += 1
        for child in children[node]:
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
        ready.sort()
    return seen != len(tasks)


def topological_order(tasks: Sequence[str], requires: Sequence[Sequence[str]]) -> list[str] | None:
    """A deterministic valid ordering (lexicographic tie-break), or None."""
    indegree = {t: 0 for t in tasks}
    children: dict[str, list[str]] = {t: [] for t in tasks}
    for before, after in requires:
        indegree[after] += 1
        children[before].append(after)
    ready = sorted(t for t, d in indegree.items() if d == 0)
    order: list[str] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for child in children[node]:
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
        ready.sort()
    return order if len(order) == len(tasks) else None


class TopologicalOrderEnv(NativeEnvironment):
    kind = "topological_order"

    def generate_payload(self, difficulty: int, rng: random.Random) -> dict[str, Any]:
        n = difficulty + 3
        tasks = [f"T{i + 1}" for i in range(n)]
        hidden = tasks[:]
        rng.shuffle(hidden)
        edge_budget = difficulty + 2
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        rng.shuffle(pairs)
        requires = [[hidden[i], hidden[j]] for i, j in pairs[:edge_budget]]
        # A third of level-3+ instances hide a cycle; cycle detection is part
        # of the task, not an error path.
        if difficulty >= 3 and rng.random() < 1 / 3 and len(requires) >= 2:
            before, after = requires[0]
            requires.append([after, before])
        return {"tasks": tasks, "requires": requires}

    def observe(self, instance: InstanceParams) -> Observation:
        tasks = instance.payload["tasks"]
        requires = instance.payload["requires"]
        constraints = "\n".join(f"- {before} must run before {after}" for before, after in requires)
        question = (
            f"Schedule the tasks {', '.join(tasks)} so that every constraint holds:\n"
            f"{constraints}\n\n"
            "Give one valid ordering of all tasks as a comma-separated list, or "
            f"answer {IMPOSSIBLE} if no valid ordering exists.\n\n"
            f"Answer: <answer>T1, T2, ...</answer> or <answer>{IMPOSSIBLE}</answer>"
        )
        return Observation(
            question_text=question,
            answer_format_hint=f"<answer>T1, T2, ...</answer> or <answer>{IMPOSSIBLE}</answer>",
        )

    def score(self, instance: InstanceParams, response_text: str) -> tuple[int, ErrorKind]:
        raw = extract_answer(response_text, take=self.answer_take)
        if raw is None:
            return 0, ErrorKind.EXTRACTION_FAILED
        tasks = instance.payload["tasks"]
        requires = instance.payload["requires"]
        cyclic = has_cycle(tasks, requires)
        answer = raw.strip()
        if answer.upper() == IMPOSSIBLE:
            return (1 if cyclic else 0), ErrorKind.NONE
        if cyclic:
            return 0, ErrorKind.NONE
        ordering = [part.strip() for part in answer.split(",") if part.strip()]
        if sorted(ordering) != sorted(tasks):
            return 0, ErrorKind.NONE
        position = {task: i for i, task in enumerate(ordering)}
        ok = all(position[before] < position[after] for before, after in requires)
        return (1 if ok else 0), ErrorKind.NONE

    def oracle_answer(self, instance: InstanceParams) -> str:
        order = topological_order(instance.payload["tasks"], instance.payload["requires"])
        return IMPOSSIBLE if order is None else ", ".join(order)
