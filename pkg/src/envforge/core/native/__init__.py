"""Native reference environments and their registry."""

from __future__ import annotations

from .base import NativeEnvironment
from .boolsat import BooleanSatEnv
from .grid import GridPathEnv, grid_min_cost
from .ordering import TopologicalOrderEnv

NATIVE_KINDS: dict[str, type[NativeEnvironment]] = {
    GridPathEnv.kind: GridPathEnv,
    TopologicalOrderEnv.kind: TopologicalOrderEnv,
    BooleanSatEnv.kind: BooleanSatEnv,
}


def create_native(kind: str, env_id: str | None = None) -> NativeEnvironment:
    if kind not in NATIVE_KINDS:
        raise ValueError(f"unknown native environment kind {kind!r}")
    return NATIVE_KINDS[kind](env_id=env_id)


__all__ = [
    "NATIVE_KINDS",
    "NativeEnvironment",
    "BooleanSatEnv",
    "GridPathEnv",
    "TopologicalOrderEnv",
    "create_native",
    "grid_min_cost",
]
