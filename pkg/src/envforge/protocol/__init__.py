from .environment import (
    EnvironmentRunnerError,
    ProtocolEnvironment,
    classify_error_message,
    verdict_from_response,
)
from .frames import (
    HELLO_FRAME,
    OPS,
    PROTOCOL_VERSION,
    FrameError,
    ProtocolRequest,
    ProtocolResponse,
    decode_request,
    decode_response,
    encode_request,
    encode_response,
)
from .policy import DEFAULT_OP_TIMEOUTS, SandboxPolicy
from .pool import SessionPool
from .session import (
    HandshakeError,
    ProtocolVersionError,
    RunnerSession,
    RunnerSpawnError,
    spawn_runner,
)

__all__ = [
    "DEFAULT_OP_TIMEOUTS",
    "EnvironmentRunnerError",
    "FrameError",
    "HELLO_FRAME",
    "HandshakeError",
    "OPS",
    "PROTOCOL_VERSION",
    "ProtocolEnvironment",
    "ProtocolRequest",
    "ProtocolResponse",
    "ProtocolVersionError",
    "RunnerSession",
    "RunnerSpawnError",
    "SandboxPolicy",
    "SessionPool",
    "classify_error_message",
    "decode_request",
    "decode_response",
    "encode_request",
    "encode_response",
    "spawn_runner",
    "verdict_from_response",
]
