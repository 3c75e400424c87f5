"""Uniform program execution: in-process toy DSL, subprocess and HTTP
clients for remote executors, a render cache, and the wire protocol."""

from .base import Executor, RenderCache, classify_dsl_error, render_sources
from .inprocess import InProcessExecutor
from .remote import (DEFAULT_TIMEOUT, ENV_SELECTOR, HttpExecutor,
                     SubprocessExecutor, from_spec)
from .wire import PROTOCOL_VERSION

__all__ = [
    "DEFAULT_TIMEOUT", "ENV_SELECTOR", "Executor", "HttpExecutor",
    "InProcessExecutor", "PROTOCOL_VERSION", "RenderCache",
    "SubprocessExecutor", "classify_dsl_error", "from_spec", "render_sources",
]
