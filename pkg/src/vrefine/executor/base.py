"""Executor core: cache, counters, error classification.

All executors share the same contract: ``execute(programs, params)``
returns a VisualState or raises ExecutionFailed carrying a classified
ExecError.  Results are cached by (program sources, params); the cache
is single-flight so concurrent identical requests run the render once,
keeping the ``runs`` counter deterministic under max_parallel > 1.
"""

from __future__ import annotations

import threading
from typing import Optional, Protocol, Sequence

import numpy as np

from .. import dsl
from ..dsl.errors import DslError, ParseError, RuntimeError_, TypeError_
from ..dsl.render import RenderParams
from ..errors import ExecError, ExecutionFailed
from ..types import Program, VisualState


class Executor(Protocol):
    def execute(self, programs: Sequence[Program], params: RenderParams) -> VisualState:
        ...


def classify_dsl_error(exc: Exception) -> ExecError:
    """Map a DSL exception onto the wire error taxonomy."""
    if isinstance(exc, ParseError):
        return ExecError(kind="parse", message=str(exc))
    if isinstance(exc, TypeError_):
        # includes UnknownIdentifier and ArityError
        return ExecError(kind="type", message=str(exc))
    if isinstance(exc, (RuntimeError_, DslError)):
        return ExecError(kind="runtime", message=str(exc))
    return ExecError(kind="internal", message=f"{type(exc).__name__}: {exc}")


def render_sources(entries: Sequence[tuple[str, str]], width: int, height: int,
                   seed: int) -> np.ndarray:
    """Parse and render (domain, source) pairs; returns the raw image array.

    Shared by the in-process executor and the wire servers.  Raises
    ExecutionFailed with a classified error.
    """
    kind_for = {"toy_texture": dsl.KIND_TEXTURE, "toy_post": dsl.KIND_POST}
    asts = []
    for domain, source in entries:
        if domain not in kind_for:
            raise ExecutionFailed(ExecError(
                kind="internal",
                message=f"domain {domain!r} is not runnable by the toy executor"))
        try:
            asts.append(dsl.parse(source, kind=kind_for[domain]))
        except DslError as exc:
            raise ExecutionFailed(classify_dsl_error(exc)) from exc
    try:
        state = dsl.render(asts, RenderParams(width, height, seed))
    except (DslError, RuntimeError_, ValueError) as exc:
        raise ExecutionFailed(classify_dsl_error(exc)) from exc
    return state.image


class RenderCache:
    """Single-flight render cache keyed by (sources, width, height, seed).

    Stores raw pixel arrays (or the classified error) so hits can be
    re-wrapped with the caller's program ids.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict = {}
        self._inflight: dict = {}
        self.runs = 0
        self.hits = 0

    @staticmethod
    def key(programs: Sequence[Program], params: RenderParams):
        return (tuple((p.domain_tag, p.source) for p in programs),
                params.width, params.height, params.seed)

    def get_or_render(self, programs: Sequence[Program], params: RenderParams,
                      compute) -> VisualState:
        key = self.key(programs, params)
        while True:
            with self._lock:
                if key in self._entries:
                    self.hits += 1
                    return self._wrap(key, programs, params)
                waiter = self._inflight.get(key)
                if waiter is None:
                    self._inflight[key] = threading.Event()
                    break
            waiter.wait()
        try:
            try:
                image = compute()
                outcome = ("ok", image)
            except ExecutionFailed as exc:
                outcome = ("err", exc.error)
            with self._lock:
                self._entries[key] = outcome
                self.runs += 1
        finally:
            with self._lock:
                self._inflight.pop(key).set()
        return self._wrap(key, programs, params)

    def _wrap(self, key, programs: Sequence[Program],
              params: RenderParams) -> VisualState:
        status, payload = self._entries[key]
        if status == "err":
            raise ExecutionFailed(payload)
        return VisualState(image=payload, width=params.width, height=params.height,
                           seed=params.seed,
                           program_ids=tuple(p.id for p in programs))
