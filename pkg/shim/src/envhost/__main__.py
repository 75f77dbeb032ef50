"""Entry point: python -m envhost BUNDLE_PATH [--env-id ID]

Startup order matters: first the protocol channel is detached from fd 1 (so
bundle prints can never corrupt it), then resource limits are installed,
then the bundle loads under those limits. Only after all three callables
resolve does the hello frame go out; a bundle that cannot load exits nonzero
with no handshake, which the engine reports as a spawn failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .binding import BindingError, load_bundle
from .limits import HostPolicy, apply_limits
from .loop import LimitedSink, hello_frame, serve_loop, warning_frame


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="envhost")
    parser.add_argument("bundle", help="path to the bundle module (bundle.py)")
    parser.add_argument("--env-id", default=None, help="override the manifest env_id")
    args = parser.parse_args(argv)

    bundle_path = Path(args.bundle)
    env_id = args.env_id or _manifest_env_id(bundle_path) or bundle_path.stem

    # Claim fd 1 for the protocol; everything else the bundle writes lands in
    # the counting sink (Python-level) or /dev/null (raw fd writes).
    proto_fd = os.dup(1)
    devnull = os.open(os.devnull, os.O_WRONLY)
    os.dup2(devnull, 1)
    os.close(devnull)
    proto_out = os.fdopen(proto_fd, "w", encoding="utf-8", buffering=1)

    policy = HostPolicy.from_env()
    warnings = apply_limits(policy)
    sink = LimitedSink(policy.max_output)
    sys.stdout = sink

    try:
        binding = load_bundle(bundle_path)
    except BindingError as exc:
        print(f"envhost: {exc}", file=sys.stderr)
        return 2

    for message in warnings:
        proto_out.write(json.dumps(warning_frame(message), sort_keys=True) + "\n")
    proto_out.write(json.dumps(hello_frame(), sort_keys=True) + "\n")
    proto_out.flush()

    try:
        return serve_loop(binding, env_id, sys.stdin, proto_out, sink=sink)
    except (BrokenPipeError, OSError):
        return 1  # unrecoverable I/O loss: clean nonzero exit


def _manifest_env_id(bundle_path: Path) -> str | None:
    manifest_path = bundle_path.parent / "manifest.json"
    if not manifest_path.exists():
        return None
    try:
        return json.loads(manifest_path.read_text(encoding="utf-8")).get("env_id")
    except (ValueError, OSError):
        return None


if __name__ == "__main__":
    sys.exit(main())
