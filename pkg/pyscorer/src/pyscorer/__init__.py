"""HTTP scoring service: /score, /embed, /health.

Wraps a cross-encoder (pair scoring) and a bi-encoder (sentence
embedding) behind a small JSON protocol so training pipelines can consume
real models over the wire. A deterministic hash backend serves tests and
offline development; transformer backends load by model name.
"""

__version__ = "0.1.0"

from .app import ServiceConfig, create_app
from .backends import HashBackend, load_embedder, load_pair_scorer

__all__ = [
    "__version__",
    "HashBackend",
    "ServiceConfig",
    "create_app",
    "load_embedder",
    "load_pair_scorer",
]
