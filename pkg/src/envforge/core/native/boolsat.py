"""Boolean constraint satisfaction with a planted assignment.

Exercises computational-advantage verification: checking an assignment
against a CNF formula is trivial for the verifier while finding one by hand
requires search. Instances are generated satisfiable by construction.
"""

from __future__ import annotations

import random
import re
from typing import Any, Sequence

from ..extraction import extract_answer
from ..types import ErrorKind, InstanceParams, Observation
from .base import NativeEnvironment

_ASSIGNMENT_TOKEN = re.compile(r"x(\d+)\s*=\s*([TF])", re.IGNORECASE)


def clause_satisfied(clause: Sequence[int], assignment: dict[int, bool]) -> bool:
    return any(assignment[abs(lit)] == (lit > 0) for lit in clause)


def parse_assignment(text: str, num_vars: int) -> dict[int, bool] | None:
    """Parse `x1=T, x2=F, ...`; every variable must appear exactly once."""
    assignment: dict[int, bool] = {}
    for match in _ASSIGNMENT_TOKEN.finditer(text):
        var = int(match.group(1))
        if var < 1 or var > num_vars or var in assignment:
            return None
        assignment[var] = match.group(2).upper() == "T"
    if len(assignment) != num_vars:
        return None
    return assignment


class BooleanSatEnv(NativeEnvironment):
    kind = "boolean_sat"

    def generate_payload(self, difficulty: int, rng: random.Random) -> dict[str, Any]:
        num_vars = difficulty + 2
        planted = {v: rng.random() < 0.5 for v in range(1, num_vars + 1)}
        clauses = []
        for _ in range(2 * num_vars):
            width = min(3, num_vars)
            vars_in_clause = rng.sample(range(1, num_vars + 1), width)
            clause = [v if rng.random() < 0.5 else -v for v in vars_in_clause]
            if not clause_satisfied(clause, planted):
                # Flip one literal so the planted assignment satisfies it.
                flip = rng.randrange(width)
                clause[flip] = -clause[flip]
            clauses.append(sorted(clause, key=abs))
        return {"num_vars": num_vars, "clauses": clauses}

    def observe(self, instance: InstanceParams) -> Observation:
        num_vars = instance.payload["num_vars"]
        clauses = instance.payload["clauses"]
        rendered = []
        for clause in clauses:
            lits = " OR ".join(f"NOT x{abs(l)}" if l < 0 else f"x{l}" for l in clause)
            rendered.append(f"({lits})")
        formula = "\nAND ".join(rendered)
        hint = "<answer>" + ", ".join(f"x{v}=T/F" for v in range(1, num_vars + 1)) + "</answer>"
        question = (
            f"Find true/false values for the variables x1..x{num_vars} that satisfy "
            "every clause of this formula:\n\n"
            f"{formula}\n\n"
            f"Give a value for every variable. Answer: {hint}"
        )
        return Observation(question_text=question, answer_format_hint=hint)

    def score(self, instance: InstanceParams, response_text: str) -> tuple[int, ErrorKind]:
        raw = extract_answer(response_text, take=self.answer_take)
        if raw is None:
            return 0, ErrorKind.EXTRACTION_FAILED
        assignment = parse_assignment(raw, instance.payload["num_vars"])
        if assignment is None:
            return 0, ErrorKind.EXTRACTION_FAILED
        ok = all(clause_satisfied(c, assignment) for c in instance.payload["clauses"])
        return (1 if ok else 0), ErrorKind.NONE

    def oracle_answer(self, instance: InstanceParams) -> str:
        # Re-derive a satisfying assignment by exhaustive search; instances
        # are small (<= 7 variables) and satisfiable by construction.
        num_vars = instance.payload["num_vars"]
        clauses = instance.payload["clauses"]
        for mask in range(1 << num_vars):
            assignment = {v: bool(mask >> (v - 1) & 1) for v in range(1, num_vars + 1)}
            if all(clause_satisfied(c, assignment) for c in clauses):
                return ", ".join(
                    f"x{v}={'T' if assignment[v] else 'F'}" for v in range(1, num_vars + 1)
                )
        raise RuntimeError("instance is unsatisfiable; generator invariant broken")
