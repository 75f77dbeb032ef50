"""Seed topic keywords spanning diverse reasoning skills.

The built-in list mixes benchmark-derived topic phrases with algorithm- and
data-structure keywords that empirically yield verifiable tasks. Extras merge
in with case-insensitive deduplication; near-duplicates that differ in
wording (e.g. "Topological Sort" vs "Topological Sorting") are kept as-is.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

BUILTIN_KEYWORDS: tuple[str, ...] = (
    "Array traversal",
    "Backtracking",
    "Boolean Evaluation",
    "Boolean Logic",
    "Chain of Dependencies",
    "Circuit Design",
    "Connected Components (graph)",
    "Constraint Satisfaction",
    "Coordinate System",
    "Counting",
    "Custom Operators",
    "Date Calculation",
    "Deductive Reasoning",
    "Direction Tracking",
    "Dyck Words",
    "Enumeration",
    "Expression Evaluation",
    "Expression Transformation",
    "First-Order Logic",
    "Geometry",
    "Grid",
    "Grid Search",
    "Grid Traversal",
    "Information Extraction",
    "Information Retrieval",
    "Interval Analysis",
    "Knowledge Base",
    "Lexicographical Order",
    "Linear Ordering",
    "Linear Search",
    "Logic Expressions",
    "Math Operations",
    "Matrix",
    "Modal Logic",
    "Number Theory",
    "Order of Operations",
    "Parentheses Matching",
    "Path Finding",
    "Pattern Matching",
    "Pattern Recognition",
    "Permutation",
    "Permutation Cipher",
    "Position Tracking",
    "Propositional Logic",
    "Rotation",
    "Rule-based Reasoning",
    "Sequence Arrangement",
    "Set Classification",
    "Set Theory",
    "Sorting",
    "Stack",
    "State Transition",
    "String Manipulation",
    "String Matching",
    "Table Analysis",
    "Time Scheduling",
    "Topological Sort",
    "Transposition Cipher",
    "Truth Table",
    "Word Search",
    "Shortest Paths",
    "Connected Components",
    "Stable Matching",
    "Dynamic Programming",
    "Recursion",
    "Greedy Algorithms",
    "Divide and Conquer",
    "Breadth-First Search",
    "Depth-First Search",
    "Path Optimization",
    "Minimum Spanning Tree",
    "Network Flow",
    "Topological Sorting",
    "Sliding Window",
    "Union Find",
    "Priority Queues",
    "Linear Programming",
    "Tree Traversal",
    "Graph Coloring",
    "Knapsack Problem",
    "Combinatorial Optimization",
    "Cycle Detection",
    "Interval Scheduling",
    "Minimum/Maximum Flow",
    "Edit Distance",
    "Euler Tours",
    "Traveling Salesman",
    "Longest Common Subsequence",
    "Longest Increasing Subsequence",
    "Item Assignment",
    "Boolean Satisfiability",
    "Tabular Data",
)


@dataclass(frozen=True)
class Keyword:
    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("keyword must be non-empty")

    @property
    def slug(self) -> str:
        return "-".join(_normalize(self.text).split())


def _normalize(text: str) -> str:
    return " ".join(text.casefold().split())


def seed_keywords(extra: Sequence[str] = ()) -> list[Keyword]:
    """Built-in list plus extras, deduplicated case-insensitively."""
    seen: set[str] = set()
    result: list[Keyword] = []
    for text in (*BUILTIN_KEYWORDS, *extra):
        key = _normalize(text)
        if not key or key in seen:
            continue
        seen.add(key)
        result.append(Keyword(text=text.strip()))
    return result
