"""Bundle loading: resolve the three required callables before serving.

A bundle is a single Python module defining generate_instance(difficulty),
render_question(instance), and verify(response_text, instance). The module
is executed in its own namespace inside this (sandboxed, disposable) host
process; the supervising engine never imports bundle code.
"""

from __future__ import annotations

import types
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

REQUIRED = ("generate_instance", "render_question", "verify")


class BindingError(RuntimeError):
    """The bundle could not be loaded or lacks a required callable."""


@dataclass(frozen=True)
class BundleBinding:
    generate_fn: Callable
    observe_fn: Callable
    verify_fn: Callable
    answer_format_hint: str
    module: types.ModuleType


def load_bundle(path: str | Path) -> BundleBinding:
    path = Path(path)
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise BindingError(f"cannot read bundle: {exc}") from exc
    module = types.ModuleType("bundle")
    module.__file__ = str(path)
    try:
        code = compile(source, str(path), "exec")
        exec(code, module.__dict__)
    except Exception as exc:
        raise BindingError(f"bundle failed to load: {exc!r}") from exc
    missing = [name for name in REQUIRED if not callable(getattr(module, name, None))]
    if missing:
        raise BindingError(f"bundle is missing required callables: {', '.join(missing)}")
    hint = getattr(module, "ANSWER_FORMAT_HINT", "")
    return BundleBinding(
        generate_fn=module.generate_instance,
        observe_fn=module.render_question,
        verify_fn=module.verify,
        answer_format_hint=hint if isinstance(hint, str) else "",
        module=module,
    )
