"""Visual imagination skip rules and idempotency."""

from __future__ import annotations

import numpy as np
import pytest

from vrefine.errors import BackendError
from vrefine.imagine import HttpImagination, MockFileImagination, imagine
from vrefine.imaging import save_png
from vrefine.types import Intent


@pytest.fixture
def mock_backend(tmp_path):
    path = tmp_path / "imagined.png"
    save_png(np.full((8, 8, 3), 77, dtype=np.uint8), path)
    return MockFileImagination(path)


def test_reference_images_suppress_imagination(mock_backend):
    ref = np.zeros((4, 4, 3), dtype=np.uint8)
    intent = Intent(text="x", reference_images=(ref,))
    assert imagine(mock_backend, intent) is intent


def test_disabled_flag_suppresses_imagination(mock_backend):
    intent = Intent(text="x")
    assert imagine(mock_backend, intent, enabled=False) is intent


def test_mock_backend_populates_imagined_images(mock_backend):
    out = imagine(mock_backend, Intent(text="celestial nebula"))
    assert len(out.imagined_images) == 1
    assert out.imagined_images[0][0, 0, 0] == 77
    assert out.text == "celestial nebula"


def test_imagine_is_idempotent(mock_backend):
    once = imagine(mock_backend, Intent(text="x"))
    twice = imagine(mock_backend, once)
    assert twice is once


def test_uses_expanded_text_when_present(tmp_path):
    class Recorder:
        def __init__(self):
            self.prompts = []

        def generate(self, prompt):
            self.prompts.append(prompt)
            return np.zeros((2, 2, 3), dtype=np.uint8)

    rec = Recorder()
    intent = Intent(text="short", expanded_text="long detailed version")
    imagine(rec, intent)
    assert rec.prompts == ["long detailed version"]


def test_missing_mock_file_is_backend_error(tmp_path):
    backend = MockFileImagination(tmp_path / "nope.png")
    with pytest.raises(BackendError):
        imagine(backend, Intent(text="x"))


def test_count_parameter(mock_backend):
    out = imagine(mock_backend, Intent(text="x"), count=3)
    assert len(out.imagined_images) == 3
