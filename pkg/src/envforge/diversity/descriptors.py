"""LLM-generated task descriptors feeding the diversity analysis.

Tasks go to the provider in batches under the descriptor prompt; the
structured JSON reply maps TASK_<i> identifiers to descriptors. Batches that
fail to parse are retried once, then reported as errors alongside the
partial results. A cache keyed by task-text hash avoids re-describing
unchanged tasks across runs.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Sequence

from ..core.serialization import stable_digest
from ..synthesis.providers import AuditLog, LlmProvider, ProviderError, SamplingParams, provider_call
from ..synthesis.templates import load_template

_JSON_BLOCK = re.compile(r"\{.*\}", re.DOTALL)


@dataclass(frozen=True)
class Descriptor:
    task_id: str
    text: str

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("descriptor text must be non-empty")


def build_task_section(tasks: Sequence[str], offset: int = 0) -> str:
    lines = []
    for i, task in enumerate(tasks):
        flattened = " ".join(task.split())
        lines.append(f"TASK_{offset + i}: {flattened}")
    return "\n".join(lines)


def descriptor_prompt(tasks: Sequence[str], offset: int = 0) -> str:
    return load_template("descriptor").format(task_section=build_task_section(tasks, offset))


def parse_descriptor_response(text: str, expected_ids: Sequence[str]) -> dict[str, str] | None:
    """Extract the task_id -> descriptor map; None when unparseable."""
    match = _JSON_BLOCK.search(text)
    if not match:
        return None
    try:
        obj = json.loads(match.group(0))
    except json.JSONDecodeError:
        return None
    if not isinstance(obj, dict):
        return None
    result = {}
    for task_id in expected_ids:
        value = obj.get(task_id)
        if not isinstance(value, str) or not value.strip():
            return None
        result[task_id] = value.strip()
    return result


def generate_descriptors(
    tasks: Sequence[str],
    provider: LlmProvider,
    batch_size: int = 10,
    params: SamplingParams | None = None,
    cache: dict[str, str] | None = None,
    audit: AuditLog | None = None,
) -> tuple[list[Descriptor], list[str]]:
    """Returns (descriptors, errors); errors name the failed batches."""
    if not tasks:
        raise ValueError("tasks must be non-empty")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    params = params or SamplingParams()
    descriptors: list[Descriptor] = []
    errors: list[str] = []
    pending: list[tuple[int, str]] = []
    for index, task in enumerate(tasks):
        key = stable_digest("descriptor", task)
        if cache is not None and key in cache:
            descriptors.append(Descriptor(task_id=f"TASK_{index}", text=cache[key]))
        else:
            pending.append((index, task))

    n_batches = math.ceil(len(pending) / batch_size) if pending else 0
    for b in range(n_batches):
        batch = pending[b * batch_size : (b + 1) * batch_size]
        ids = [f"TASK_{index}" for index, _ in batch]
        prompt = _batch_prompt(batch)
        parsed = None
        for _attempt in range(2):  # one retry on unparseable output
            try:
                reply = provider_call(
                    provider, prompt, params, audit=audit, stage="descriptors", keyword=f"batch-{b}"
                )
            except ProviderError as exc:
                errors.append(f"batch {b}: provider failure: {exc}")
                break
            parsed = parse_descriptor_response(reply, ids)
            if parsed is not None:
                break
        else:
            pass
        if parsed is None:
            if not errors or not errors[-1].startswith(f"batch {b}:"):
                errors.append(f"batch {b}: unparseable descriptor response")
            continue
        for (index, task), task_id in zip(batch, ids):
            text = parsed[task_id]
            descriptors.append(Descriptor(task_id=task_id, text=text))
            if cache is not None:
                cache[stable_digest("descriptor", task)] = text

    descriptors.sort(key=lambda d: int(d.task_id.split("_")[1]))
    return descriptors, errors


def _batch_prompt(batch: Sequence[tuple[int, str]]) -> str:
    lines = []
    for index, task in batch:
        flattened = " ".join(task.split())
        lines.append(f"TASK_{index}: {flattened}")
    return load_template("descriptor").format(task_section="\n".join(lines))
