"""In-process executor for the toy DSL domains."""

from __future__ import annotations

from typing import Sequence

from ..dsl.render import RenderParams
from ..errors import ExecError, ExecutionFailed
from ..types import Program, VisualState
from .base import RenderCache, render_sources


class InProcessExecutor:
    """Runs toy_texture / toy_post programs by direct interpretation."""

    def __init__(self):
        self.cache = RenderCache()

    def execute(self, programs: Sequence[Program],
                params: RenderParams) -> VisualState:
        if not programs:
            raise ExecutionFailed(ExecError(kind="internal",
                                            message="no programs to execute"))
        entries = [(p.domain_tag, p.source) for p in programs]
        return self.cache.get_or_render(
            programs, params,
            lambda: render_sources(entries, params.width, params.height,
                                   params.seed))
