from .bundles import BundleParse, BundleRef, parse_bundle_source, write_bundle
from .judging import (
    JudgeStage,
    JudgeVerdict,
    failed_verdict,
    judge_pass_rule,
    make_verdict,
    parse_judge_flags,
)
from .keywords import BUILTIN_KEYWORDS, Keyword, seed_keywords
from .lifecycle import ALLOWED_TRANSITIONS, EnvironmentSpec, LifecycleError, SpecStore, Status
from .mock import MockProvider
from .pipeline import (
    SynthesisResult,
    judge_stage1,
    judge_stage2,
    revise,
    run_judging,
    smoke_test,
    synthesize_environments,
)
from .providers import (
    AuditLog,
    HttpChatProvider,
    LlmProvider,
    ProviderError,
    ProviderTransportError,
    RateLimitedProvider,
    RetryingProvider,
    SamplingParams,
    TokenBucket,
    provider_call,
)

__all__ = [
    "ALLOWED_TRANSITIONS",
    "AuditLog",
    "BUILTIN_KEYWORDS",
    "BundleParse",
    "BundleRef",
    "EnvironmentSpec",
    "HttpChatProvider",
    "JudgeStage",
    "JudgeVerdict",
    "Keyword",
    "LifecycleError",
    "LlmProvider",
    "MockProvider",
    "ProviderError",
    "ProviderTransportError",
    "RateLimitedProvider",
    "RetryingProvider",
    "SamplingParams",
    "SpecStore",
    "Status",
    "SynthesisResult",
    "TokenBucket",
    "failed_verdict",
    "judge_pass_rule",
    "judge_stage1",
    "judge_stage2",
    "make_verdict",
    "parse_bundle_source",
    "parse_judge_flags",
    "provider_call",
    "revise",
    "run_judging",
    "seed_keywords",
    "smoke_test",
    "synthesize_environments",
    "write_bundle",
]
