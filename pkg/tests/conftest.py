"""Shared fixtures and tiny helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from vrefine import dsl
from vrefine.dsl.render import RenderParams
from vrefine.types import Intent, Program, VisualState


def make_state(pixels, seed=0, program_ids=("p",)) -> VisualState:
    """VisualState from a nested list / array of RGB rows."""
    img = np.asarray(pixels, dtype=np.uint8)
    if img.ndim == 1:  # a single pixel
        img = img.reshape(1, 1, 3)
    h, w, _ = img.shape
    return VisualState(image=img, width=w, height=h, seed=seed,
                       program_ids=tuple(program_ids))


def solid_state(value, w=2, h=2, seed=0) -> VisualState:
    img = np.full((h, w, 3), value, dtype=np.uint8)
    return VisualState(image=img, width=w, height=h, seed=seed, program_ids=("p",))


def corpus_program(name: str) -> Program:
    source, domain = dsl.load_corpus(name)
    return Program.create(source, domain)


def render_source(source: str, w=16, h=16, seed=0) -> VisualState:
    return dsl.render([dsl.parse(source)], RenderParams(w, h, seed))


@pytest.fixture
def intent() -> Intent:
    return Intent(text="match the target image")
