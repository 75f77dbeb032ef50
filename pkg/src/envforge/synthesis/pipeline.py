"""Pipeline stages 1-3: synthesis, two-stage judging, one revise-and-retry.

Specs persist at every decision point (draft, judged_fail, revised,
accepted/rejected), so an interrupted run resumes idempotently: reruns of a
deterministic provider regenerate identical intermediate artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..core.ops import render_observation, sample_instances, verify
from ..core.serialization import stable_u64
from ..core.types import DIFFICULTY_LEVELS, EnvironmentInterface, Response
from .bundles import BundleParse, bundle_env_id, parse_bundle_source, write_bundle
from .judging import (
    JudgeStage,
    JudgeVerdict,
    failed_verdict,
    make_verdict,
    parse_judge_flags,
)
from .keywords import Keyword
from .lifecycle import MAX_REVISIONS, EnvironmentSpec, SpecStore, Status
from .providers import AuditLog, LlmProvider, ProviderError, SamplingParams, provider_call
from .templates import load_template

EnvFactory = Callable[[EnvironmentSpec], EnvironmentInterface]

DEFAULT_ATTEMPTS = 8
DEFAULT_PROBES_PER_LEVEL = 3


@dataclass
class SynthesisResult:
    drafts: list[EnvironmentSpec] = field(default_factory=list)
    parse_failures: int = 0
    provider_errors: int = 0


def synthesize_environments(
    keyword: Keyword,
    provider: LlmProvider,
    workspace_root: Path,
    runner_command: list[str],
    attempts: int = DEFAULT_ATTEMPTS,
    params: SamplingParams | None = None,
    audit: AuditLog | None = None,
) -> SynthesisResult:
    """Prompt `attempts` times for the keyword; keep template-conforming drafts."""
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    params = params or SamplingParams()
    prompt = load_template("synthesis").format(keyword=keyword.text)
    result = SynthesisResult()
    for attempt in range(attempts):
        try:
            source = provider_call(
                provider, prompt, params, audit=audit, stage="synthesize", keyword=keyword.text
            )
        except ProviderError:
            result.provider_errors += 1
            continue
        parse = parse_bundle_source(source)
        if not parse.ok:
            result.parse_failures += 1
            continue
        env_id = bundle_env_id(keyword.slug, attempt, source)
        bundle = write_bundle(workspace_root, env_id, source, runner_command)
        result.drafts.append(
            EnvironmentSpec(
                env_id=env_id,
                keyword=keyword.text,
                title=parse.title or keyword.text,
                source=source,
                bundle=bundle,
            )
        )
    return result


def smoke_test(spec: EnvironmentSpec, env: EnvironmentInterface) -> str | None:
    """One generate/observe/verify round trip; returns an issue or None."""
    try:
        instances = sample_instances(env, 1, 1, stable_u64("smoke", spec.env_id))
        observation = render_observation(env, instances[0])
        if not observation.question_text.strip():
            return "smoke test failed: empty question"
        verdict = verify(env, instances[0], Response("<answer>smoke probe</answer>"))
        if verdict.reward not in (0, 1):
            return "smoke test failed: verifier returned a non-binary reward"
    except Exception as exc:
        return f"smoke test failed: {exc}"
    return None


def judge_stage1(
    spec: EnvironmentSpec,
    provider: LlmProvider,
    params: SamplingParams | None = None,
    audit: AuditLog | None = None,
) -> JudgeVerdict:
    if spec.status not in (Status.DRAFT, Status.REVISED):
        raise ValueError(f"stage-1 judging requires draft or revised, got {spec.status.value}")
    params = params or SamplingParams()
    prompt = load_template("judge_stage1").format(source=spec.source)
    # Unparseable judge output is retried once, then fails the verdict;
    # provider failures propagate (retriable, not a judgment).
    for _attempt in range(2):
        reply = provider_call(
            provider, prompt, params, audit=audit, stage="judge_stage1", keyword=spec.keyword
        )
        parsed = parse_judge_flags(reply, JudgeStage.CODE_REVIEW)
        if parsed is not None:
            flags, issues = parsed
            return make_verdict(JudgeStage.CODE_REVIEW, flags, issues)
    return failed_verdict(JudgeStage.CODE_REVIEW, ("judge output unparseable",))


def judge_stage2(
    spec: EnvironmentSpec,
    provider: LlmProvider,
    env: EnvironmentInterface,
    probes_per_level: int = DEFAULT_PROBES_PER_LEVEL,
    params: SamplingParams | None = None,
    audit: AuditLog | None = None,
) -> JudgeVerdict:
    """Render probe questions at every level; any ill-specified probe fails."""
    if probes_per_level < 1:
        raise ValueError("probes_per_level must be >= 1")
    params = params or SamplingParams()
    template = load_template("judge_stage2")
    aggregate = {"well_specified": True, "loophole_free": True}
    issues: list[str] = []
    for difficulty in DIFFICULTY_LEVELS:
        try:
            probe_seed = stable_u64("probe", spec.env_id, spec.revision_count, difficulty)
            instances = sample_instances(env, difficulty, probes_per_level, probe_seed)
            questions = [render_observation(env, inst).question_text for inst in instances]
        except Exception as exc:
            return failed_verdict(
                JudgeStage.QUESTION_REVIEW, (f"probe generation failed: {exc}",)
            )
        for question in questions:
            prompt = template.format(difficulty=difficulty, question=question)
            parsed = None
            for _attempt in range(2):
                reply = provider_call(
                    provider, prompt, params, audit=audit, stage="judge_stage2", keyword=spec.keyword
                )
                parsed = parse_judge_flags(reply, JudgeStage.QUESTION_REVIEW)
                if parsed is not None:
                    break
            if parsed is None:
                return failed_verdict(JudgeStage.QUESTION_REVIEW, ("judge output unparseable",))
            flags, probe_issues = parsed
            for name in aggregate:
                aggregate[name] = aggregate[name] and flags[name]
            if not all(flags.values()):
                issues.extend(f"difficulty {difficulty}: {issue}" for issue in probe_issues)
                issues.append(f"offending question (difficulty {difficulty}): {question}")
    return make_verdict(JudgeStage.QUESTION_REVIEW, aggregate, tuple(issues))


def revise(
    spec: EnvironmentSpec,
    provider: LlmProvider,
    workspace_root: Path,
    runner_command: list[str],
    params: SamplingParams | None = None,
    audit: AuditLog | None = None,
) -> BundleParse:
    """Rewrite a failed spec from its implementation plus the issue record.

    Mutates the spec in place to REVISED with the new bundle. Raises
    ProviderError when the provider fails (spec untouched, retriable).
    """
    if spec.status is not Status.JUDGED_FAIL:
        raise ValueError(f"revise requires judged_fail, got {spec.status.value}")
    if spec.revision_count >= MAX_REVISIONS:
        raise ValueError("single-revision cap reached")
    params = params or SamplingParams()
    issues = spec.all_issues() or ("no specific issues recorded",)
    prompt = load_template("revise").format(
        source=spec.source, issues="\n".join(f"- {issue}" for issue in issues)
    )
    revised_source = provider_call(
        provider, prompt, params, audit=audit, stage="revise", keyword=spec.keyword
    )
    parse = parse_bundle_source(revised_source)
    spec.revision_count += 1
    spec.transition(Status.REVISED)
    if parse.ok:
        spec.source = revised_source
        spec.bundle = write_bundle(workspace_root, spec.env_id, revised_source, runner_command)
        if parse.title:
            spec.title = parse.title
    return parse


def run_judging(
    spec: EnvironmentSpec,
    provider: LlmProvider,
    env_factory: EnvFactory,
    store: SpecStore,
    workspace_root: Path,
    runner_command: list[str],
    probes_per_level: int = DEFAULT_PROBES_PER_LEVEL,
    params: SamplingParams | None = None,
    audit: AuditLog | None = None,
) -> EnvironmentSpec:
    """Drive one spec through judge -> (revise -> judge) to a terminal status."""
    if spec.status is Status.DRAFT:
        passed = _judge_pass(spec, provider, env_factory, probes_per_level, params, audit)
        if passed:
            spec.transition(Status.ACCEPTED)
            store.save(spec)
            return spec
        spec.transition(Status.JUDGED_FAIL)
        store.save(spec)

    if spec.status is Status.JUDGED_FAIL:
        try:
            parse = revise(spec, provider, workspace_root, runner_command, params=params, audit=audit)
        except ProviderError:
            store.save(spec)  # left failed; retriable on the next run
            raise
        store.save(spec)
        if not parse.ok:
            spec.judge_records.append(
                failed_verdict(JudgeStage.CODE_REVIEW, ("revision did not match the code template",))
            )
            spec.transition(Status.REJECTED)
            store.save(spec)
            return spec

    if spec.status is Status.REVISED:
        passed = _judge_pass(spec, provider, env_factory, probes_per_level, params, audit)
        spec.transition(Status.ACCEPTED if passed else Status.REJECTED)
        store.save(spec)
    return spec


def _judge_pass(
    spec: EnvironmentSpec,
    provider: LlmProvider,
    env_factory: EnvFactory,
    probes_per_level: int,
    params: SamplingParams | None,
    audit: AuditLog | None,
) -> bool:
    # Runtime smoke test before any judging: a bundle that cannot complete one
    # generate/observe/verify round trip is not worth LLM review.
    try:
        env = env_factory(spec)
    except Exception as exc:
        spec.judge_records.append(
            failed_verdict(JudgeStage.CODE_REVIEW, (f"smoke test failed: {exc}",))
        )
        return False
    issue = smoke_test(spec, env)
    if issue is not None:
        spec.judge_records.append(failed_verdict(JudgeStage.CODE_REVIEW, (issue,)))
        return False

    stage1 = judge_stage1(spec, provider, params=params, audit=audit)
    spec.judge_records.append(stage1)
    if not stage1.passed:
        return False

    stage2 = judge_stage2(
        spec, provider, env, probes_per_level=probes_per_level, params=params, audit=audit
    )
    spec.judge_records.append(stage2)
    return stage2.passed
