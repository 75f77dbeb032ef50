"""Command-line pipeline: keywords -> synth -> judge -> calibrate -> gen -> entropy.

Every stage is idempotent over the workspace: completed work units are
detected from persisted state and skipped, so an interrupted run resumes by
rerunning the same command. Exit codes are a scripting contract: 0 success,
2 invalid configuration, 3 provider exhausted (state is resumable), 4 serve
surface unavailable.
"""

from __future__ import annotations

import argparse
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .calibration.solve import calibrate, curve_to_csv
from .config import ConfigError, PipelineConfig, load_config
from .core.serialization import stable_u64
from .dataset.build import (
    DatasetConfig,
    build_dataset,
    build_proportional_dataset,
    load_manifest,
    load_records,
)
from .diversity.clustering import curve_to_csv as entropy_csv
from .diversity.clustering import curve_to_series, default_tau_grid, entropy_curve
from .diversity.descriptors import generate_descriptors
from .diversity.embeddings import HashingEmbedder, RemoteEmbedder
from .registry import EnvironmentResolver
from .rewards.scoring import PROMPT_PREFIX
from .rewards.serve import serve_frames
from .synthesis.keywords import Keyword, seed_keywords
from .synthesis.lifecycle import SpecStore, Status
from .synthesis.mock import MockProvider
from .synthesis.pipeline import run_judging, synthesize_environments
from .synthesis.providers import (
    AuditLog,
    HttpChatProvider,
    ProviderError,
    RateLimitedProvider,
    RetryingProvider,
    SamplingParams,
    TokenBucket,
)
from .workspace import Workspace

STAGES = ("keywords", "synth", "judge", "calibrate", "gen", "entropy")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROVIDER = 3
EXIT_SERVE = 4


@dataclass
class RunContext:
    config: PipelineConfig
    workspace: Workspace
    provider: object
    audit: AuditLog
    params: SamplingParams
    store: SpecStore
    resolver: EnvironmentResolver
    processed: dict[str, int]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_effective_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "run":
        return cmd_run(args.stage, config, dry_run=args.dry_run)
    if args.command == "serve":
        return cmd_serve(config, manifest_override=args.manifest)
    parser.print_help()
    return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="envforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run pipeline stages")
    run.add_argument("--stage", choices=STAGES + ("all",), default="all")
    _common_flags(run)
    run.add_argument("--dry-run", action="store_true", help="validate and print the plan only")

    serve = sub.add_parser("serve", help="serve reward scoring frames over stdio")
    _common_flags(serve)
    serve.add_argument("--manifest", default=None, help="dataset manifest path override")
    return parser


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="pipeline config JSON")
    sub.add_argument("--workspace", default=None, help="workspace directory override")
    sub.add_argument("--seed", type=int, default=None, help="pipeline seed override")
    sub.add_argument("--provider", choices=("mock", "live"), default=None, help="provider override")


def _load_effective_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    if args.workspace is not None:
        config.workspace = args.workspace
    if args.seed is not None:
        config.seed = args.seed
    if getattr(args, "provider", None) is not None:
        # "live" selects the configured remote provider; "http" is its kind.
        config.provider.kind = "mock" if args.provider == "mock" else "http"
    config.validate()
    return config


def build_provider(config: PipelineConfig):
    if config.provider.kind == "mock":
        provider = MockProvider()
    else:
        provider = HttpChatProvider(
            endpoint=config.provider.endpoint,
            model=config.provider.model,
            api_key_env=config.provider.api_key_env,
        )
        provider = RetryingProvider(provider, retries=config.provider.retries)
    if config.provider.requests_per_second:
        provider = RateLimitedProvider(provider, TokenBucket(config.provider.requests_per_second))
    return provider


def cmd_run(stage: str, config: PipelineConfig, dry_run: bool = False) -> int:
    stages = list(STAGES) if stage == "all" else [stage]
    if dry_run:
        keywords = _plan_keywords(config)
        print(f"workspace: {config.workspace}")
        print(f"stages: {', '.join(stages)}")
        print(f"provider: {config.provider.kind}")
        print(f"keywords: {len(keywords)}")
        print(f"dataset: {config.dataset.env_count} envs x {config.dataset.per_env} instances")
        return EXIT_OK

    workspace = Workspace(config.workspace_path)
    workspace.root.mkdir(parents=True, exist_ok=True)
    context = RunContext(
        config=config,
        workspace=workspace,
        provider=build_provider(config),
        audit=AuditLog(workspace.provider_log_path),
        params=SamplingParams(
            temperature=config.sampling.temperature, max_tokens=config.sampling.max_tokens
        ),
        store=SpecStore(workspace.root),
        resolver=EnvironmentResolver(
            base_dir=workspace.root, policy=config.sandbox.to_policy()
        ),
        processed={name: 0 for name in STAGES},
    )
    runners = {
        "keywords": stage_keywords,
        "synth": stage_synth,
        "judge": stage_judge,
        "calibrate": stage_calibrate,
        "gen": stage_gen,
        "entropy": stage_entropy,
    }
    try:
        for name in stages:
            runners[name](context)
    except ProviderError as exc:
        print(f"provider exhausted: {exc} (state is resumable; rerun to continue)", file=sys.stderr)
        write_report(context, stages, interrupted=True)
        return EXIT_PROVIDER
    finally:
        context.resolver.close()
    write_report(context, stages)
    return EXIT_OK


def _plan_keywords(config: PipelineConfig) -> list[Keyword]:
    if config.synthesis.keywords is not None:
        return [Keyword(text) for text in config.synthesis.keywords]
    return seed_keywords(config.synthesis.extra_keywords)


# --- stages -------------------------------------------------------------------


def stage_keywords(ctx: RunContext) -> None:
    keywords = _plan_keywords(ctx.config)
    ctx.workspace.write_json(ctx.workspace.keywords_path, [k.text for k in keywords])
    ctx.processed["keywords"] = len(keywords)


def stage_synth(ctx: RunContext) -> None:
    if not ctx.workspace.keywords_path.exists():
        stage_keywords(ctx)
    keywords = [Keyword(t) for t in ctx.workspace.read_json(ctx.workspace.keywords_path)]

    def work(keyword: Keyword) -> int:
        marker = ctx.workspace.synth_marker(keyword.slug)
        if marker.exists():
            return 0
        result = synthesize_environments(
            keyword,
            ctx.provider,
            ctx.workspace.root,
            ctx.config.runner_command,
            attempts=ctx.config.synthesis.attempts,
            params=ctx.params,
            audit=ctx.audit,
        )
        for spec in result.drafts:
            if not ctx.store.exists(spec.env_id):
                ctx.store.save(spec)
        if result.provider_errors:
            # Partial drafts are persisted, but the keyword is not complete:
            # leave the marker unwritten so a rerun finishes the attempts.
            raise ProviderError(
                f"{result.provider_errors} synthesis attempts failed for {keyword.text!r}"
            )
        ctx.workspace.write_json(
            marker,
            {
                "env_ids": sorted(d.env_id for d in result.drafts),
                "keyword": keyword.text,
                "parse_failures": result.parse_failures,
                "provider_errors": 0,
            },
        )
        return 1

    ctx.processed["synth"] = sum(_map(ctx, work, keywords))


def stage_judge(ctx: RunContext) -> None:
    pending = [
        spec
        for spec in ctx.store.load_all()
        if spec.status in (Status.DRAFT, Status.JUDGED_FAIL, Status.REVISED)
    ]

    def work(spec) -> int:
        opened = []

        def env_factory(s):
            env = ctx.resolver.resolve(s.bundle.bundle_dir)
            opened.append(env)
            return env

        run_judging(
            spec,
            ctx.provider,
            env_factory,
            ctx.store,
            ctx.workspace.root,
            ctx.config.runner_command,
            probes_per_level=ctx.config.synthesis.probes_per_level,
            params=ctx.params,
            audit=ctx.audit,
        )
        return 1

    ctx.processed["judge"] = sum(_map(ctx, work, pending))


def stage_calibrate(ctx: RunContext) -> None:
    accepted = [s for s in ctx.store.load_all() if s.status is Status.ACCEPTED]
    pending = []
    for spec in accepted:
        path = ctx.workspace.calibration_path(spec.env_id)
        if path.exists():
            report = ctx.workspace.read_json(path)
            if report["decision"] != "inconclusive":
                continue
        pending.append(spec)

    def work(spec) -> int:
        env = ctx.resolver.resolve(spec.bundle.bundle_dir)
        report = calibrate(
            env,
            ctx.provider,
            samples_per_level=ctx.config.calibration.samples_per_level,
            alpha=ctx.config.calibration.alpha,
            seed=ctx.config.seed,
            method=ctx.config.calibration.method,
            params=ctx.params,
            audit=ctx.audit,
        )
        if report.provider_failures:
            # The work unit is incomplete: persist only the explicitly
            # re-runnable inconclusive form, then surface the outage so the
            # resumed run recalibrates on full trials.
            if report.decision == "inconclusive":
                ctx.workspace.write_json(
                    ctx.workspace.calibration_path(spec.env_id), report.to_obj()
                )
            raise ProviderError(
                f"calibration shortfall for {spec.env_id}: "
                f"{report.completed_trials}/{report.planned_trials} trials"
            )
        ctx.workspace.write_json(ctx.workspace.calibration_path(spec.env_id), report.to_obj())
        ctx.workspace.write_text(
            ctx.workspace.calibration_path(spec.env_id).with_suffix(".csv"), curve_to_csv(report)
        )
        return 1

    ctx.processed["calibrate"] = sum(_map(ctx, work, pending))


def _kept_env_pool(ctx: RunContext) -> list[tuple[str, object]]:
    pool = []
    for spec in ctx.store.load_all():
        if spec.status is not Status.ACCEPTED:
            continue
        path = ctx.workspace.calibration_path(spec.env_id)
        if not path.exists() or ctx.workspace.read_json(path)["decision"] != "keep":
            continue
        ref = spec.bundle.bundle_dir
        pool.append((ref, ctx.resolver.resolve(ref)))
    return pool


def stage_gen(ctx: RunContext) -> None:
    section = ctx.config.dataset
    train_dir = ctx.workspace.dataset_dir(section.name)
    val_dir = ctx.workspace.dataset_dir(f"{section.name}-val")
    done = 0
    pool = None
    if not (train_dir / "manifest.json").exists():
        pool = _kept_env_pool(ctx)
        if not pool:
            raise RuntimeError(
                "no environments kept by calibration; run the earlier stages first"
            )
        config = DatasetConfig(
            env_count=section.env_count,
            per_env=section.per_env,
            dataset_seed=ctx.config.seed,
            split="train",
            name=section.name,
        )
        build_dataset(config, pool, train_dir)
        done += 1
    if section.val_total > 0 and not (val_dir / "manifest.json").exists():
        pool = pool if pool is not None else _kept_env_pool(ctx)
        build_proportional_dataset(
            total=section.val_total,
            envs=pool,
            dataset_seed=ctx.config.seed,
            out_dir=val_dir,
            split="val",
            name=f"{section.name}-val",
        )
        done += 1
    ctx.processed["gen"] = done


def stage_entropy(ctx: RunContext) -> None:
    analysis = ctx.workspace.analysis_dir
    if (analysis / "entropy.json").exists():
        return
    train_dir = ctx.workspace.dataset_dir(ctx.config.dataset.name)
    records = load_records(train_dir)
    tasks = [_strip_prefix(r.prompt) for r in records]
    sample_size = min(ctx.config.entropy.sample_size, len(tasks))
    rng = random.Random(stable_u64("entropy-sample", ctx.config.seed))
    tasks = rng.sample(tasks, sample_size)

    cache_path = analysis / "descriptor_cache.json"
    cache = ctx.workspace.read_json(cache_path) if cache_path.exists() else {}
    descriptors, errors = generate_descriptors(
        tasks,
        ctx.provider,
        batch_size=ctx.config.entropy.batch_size,
        params=ctx.params,
        cache=cache,
        audit=ctx.audit,
    )
    if errors or not descriptors:
        # Keep the partial descriptor cache so the rerun only redoes the
        # failed batches, then surface the outage.
        ctx.workspace.write_json(cache_path, cache)
        raise ProviderError(f"descriptor generation incomplete: {errors or 'no descriptors'}")
    embedder = _build_embedder(ctx.config)
    embeddings = embedder.embed([d.text for d in descriptors])
    taus = ctx.config.entropy.taus or default_tau_grid()
    points = entropy_curve(embeddings, taus)

    ctx.workspace.write_json(cache_path, cache)
    ctx.workspace.write_json(
        analysis / "descriptors.json", {d.task_id: d.text for d in descriptors}
    )
    ctx.workspace.write_text(analysis / "entropy.csv", entropy_csv(points))
    ctx.workspace.write_json(
        analysis / "entropy.json",
        {
            "embedder": embedder.provider_id,
            "errors": errors,
            "sample_size": sample_size,
            "series": curve_to_series(points),
        },
    )
    ctx.processed["entropy"] = len(points)


def _build_embedder(config: PipelineConfig):
    if config.entropy.embedder == "hashing":
        return HashingEmbedder(dim=config.entropy.embedding_dim)
    return RemoteEmbedder(
        endpoint=config.entropy.endpoint,
        model=config.entropy.model,
        dim=config.entropy.embedding_dim,
    )


def _strip_prefix(prompt: str) -> str:
    if prompt.startswith(PROMPT_PREFIX):
        return prompt[len(PROMPT_PREFIX) :].lstrip("\n")
    return prompt


def _map(ctx: RunContext, fn, items):
    if ctx.config.workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    # Parallel work units only mutate their own files; the audit log order is
    # stable only at workers=1 (the deterministic-run configuration).
    with ThreadPoolExecutor(max_workers=ctx.config.workers) as pool:
        return list(pool.map(fn, items))


# --- reporting ------------------------------------------------------------------


def write_report(ctx: RunContext, stages: list[str], interrupted: bool = False) -> None:
    status_counts = {status.value: 0 for status in Status}
    for spec in ctx.store.load_all():
        status_counts[spec.status.value] += 1
    calibration = {"keep": 0, "discard": 0, "inconclusive": 0}
    if ctx.workspace.calibration_dir.exists():
        for path in sorted(ctx.workspace.calibration_dir.glob("*.json")):
            calibration[ctx.workspace.read_json(path)["decision"]] += 1
    datasets = {}
    datasets_root = ctx.workspace.root / "datasets"
    if datasets_root.exists():
        for manifest_path in sorted(datasets_root.glob("*/manifest.json")):
            manifest = load_manifest(manifest_path)
            datasets[manifest.name] = manifest.record_count
    keywords = 0
    if ctx.workspace.keywords_path.exists():
        keywords = len(ctx.workspace.read_json(ctx.workspace.keywords_path))
    ctx.workspace.write_json(
        ctx.workspace.report_path,
        {
            "calibration": calibration,
            "datasets": datasets,
            "interrupted": interrupted,
            "keywords": keywords,
            "processed": ctx.processed,
            "stages_run": stages,
            "status_counts": status_counts,
        },
    )


# --- serve ----------------------------------------------------------------------


def cmd_serve(config: PipelineConfig, manifest_override: str | None = None) -> int:
    workspace = Workspace(config.workspace_path)
    manifest_path = (
        Path(manifest_override)
        if manifest_override
        else workspace.dataset_dir(config.dataset.name) / "manifest.json"
    )
    if not manifest_path.exists():
        print(f"dataset manifest not available: {manifest_path}", file=sys.stderr)
        return EXIT_SERVE
    records = {r.record_id: r for r in load_records(manifest_path.parent)}
    resolver = EnvironmentResolver(base_dir=workspace.root, policy=config.sandbox.to_policy())
    try:
        serve_frames(records, resolver.resolve, sys.stdin, sys.stdout)
    except KeyboardInterrupt:
        pass
    except OSError as exc:
        print(f"serve stream failed: {exc}", file=sys.stderr)
        return EXIT_SERVE
    finally:
        resolver.close()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
