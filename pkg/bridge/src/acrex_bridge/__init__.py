"""Inference peer speaking line-delimited JSON over stdin/stdout."""

from .serving import (
    PLAIN_SENTINELS,
    BridgeConfig,
    BridgeStartupError,
    apply_sentinel_map,
    load_generator,
    normalize_sentinel_spacing,
    parse_request,
    serve,
)

__version__ = "0.1.0"

__all__ = [
    "PLAIN_SENTINELS",
    "BridgeConfig",
    "BridgeStartupError",
    "apply_sentinel_map",
    "load_generator",
    "normalize_sentinel_spacing",
    "parse_request",
    "serve",
    "__version__",
]
