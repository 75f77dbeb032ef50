"""envhost: serve an environment bundle over the newline-JSON wire protocol."""

from .binding import BindingError, BundleBinding, load_bundle
from .limits import HostPolicy, apply_limits
from .loop import LimitedSink, instance_seed, serve_loop

__version__ = "0.1.0"

__all__ = [
    "BindingError",
    "BundleBinding",
    "HostPolicy",
    "LimitedSink",
    "apply_limits",
    "instance_seed",
    "load_bundle",
    "serve_loop",
]
