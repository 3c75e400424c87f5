"""Renderer semantics: quantization, composites, determinism, purity."""

from __future__ import annotations

import numpy as np
import pytest

from vrefine import dsl
from vrefine.dsl import RuntimeError_
from vrefine.dsl.render import RenderParams, pixel_centers


def _render(sources, w, h, seed):
    asts = [dsl.parse(s) for s in sources]
    return dsl.render(asts, RenderParams(w, h, seed))


def test_solid_red_everywhere():
    state = _render(["output rgb(1, 0, 0)"], 4, 4, 0)
    assert np.all(state.image == np.array([255, 0, 0], dtype=np.uint8))


def test_exposure_doubles_midgray_to_white():
    state = _render(["output rgb(0.5, 0.5, 0.5)", "output exposure(input, 1.0)"], 1, 1, 0)
    assert state.image[0, 0].tolist() == [255, 255, 255]


def test_render_is_deterministic():
    src = dsl.load_corpus("nebula")[0]
    a = _render([src], 32, 32, 7)
    b = _render([src], 32, 32, 7)
    assert a.digest() == b.digest()


def test_seed_changes_noise_output():
    src = "output noise(6, 0)"
    assert _render([src], 16, 16, 1).digest() != _render([src], 16, 16, 2).digest()


def test_scalar_output_promotes_to_gray():
    state = _render(["output 0.5"], 1, 1, 0)
    px = state.image[0, 0]
    assert px[0] == px[1] == px[2] == 128  # 127.5 rounds half-to-even to 128


def test_quantization_clamps():
    state = _render(["output rgb(2.5, -1, 0.2)"], 1, 1, 0)
    assert state.image[0, 0].tolist() == [255, 0, 51]


def test_first_program_must_be_texture():
    post = dsl.parse("output exposure(input, 1)")
    with pytest.raises(RuntimeError_):
        dsl.render([post], RenderParams(2, 2, 0))


def test_post_must_follow_texture():
    tex = dsl.parse("output rgb(1,1,1)")
    with pytest.raises(RuntimeError_):
        dsl.render([tex, tex], RenderParams(2, 2, 0))


def test_decreasing_ramp_positions_raise_at_runtime():
    src = "output ramp(noise(4, 0), 0.8, rgb(0,0,0), 0.2, rgb(1,1,1))"
    with pytest.raises(RuntimeError_):
        _render([src], 4, 4, 0)


def test_ramp_endpoints_and_interior():
    # t below the first stop -> first color; above the last -> last color
    lo = _render(["output ramp(0, 0.25, rgb(0,0,0), 0.75, rgb(1,1,1))"], 1, 1, 0)
    hi = _render(["output ramp(1, 0.25, rgb(0,0,0), 0.75, rgb(1,1,1))"], 1, 1, 0)
    mid = _render(["output ramp(0.5, 0.25, rgb(0,0,0), 0.75, rgb(1,1,1))"], 1, 1, 0)
    assert lo.image[0, 0].tolist() == [0, 0, 0]
    assert hi.image[0, 0].tolist() == [255, 255, 255]
    assert mid.image[0, 0].tolist() == [128, 128, 128]


def test_ramp_zero_length_segment_takes_later_color():
    state = _render(
        ["output ramp(0.5, 0.5, rgb(0,0,0), 0.5, rgb(1,0,0))"], 1, 1, 0)
    assert state.image[0, 0].tolist() == [255, 0, 0]


def test_tint_and_contrast():
    tinted = _render(["output rgb(0.5, 0.5, 0.5)",
                      "output tint(input, rgb(1, 0.5, 0))"], 1, 1, 0)
    assert tinted.image[0, 0].tolist() == [128, 64, 0]
    flat = _render(["output rgb(0.25, 0.5, 1)", "output contrast(input, 0)"], 1, 1, 0)
    assert flat.image[0, 0].tolist() == [128, 128, 128]


def test_checker_alternates():
    state = _render(["output checker(2)"], 2, 2, 0)
    assert state.image[0, 0, 0] == 255
    assert state.image[0, 1, 0] == 0
    assert state.image[1, 0, 0] == 0
    assert state.image[1, 1, 0] == 255


def test_noise_render_matches_scalar_reference_per_pixel():
    w = h = 8
    seed = 42
    state = _render(["output noise(4.0, 3)"], w, h, seed)
    u, v = pixel_centers(w, h)
    for py in range(h):
        for px in range(w):
            i = py * w + px
            expect = dsl.value_noise(u[i] * 4.0, v[i] * 4.0, seed + 3)
            q = int(np.rint(min(max(expect, 0.0), 1.0) * 255.0))
            assert state.image[py, px, 0] == q


def test_builtin_outputs_stay_in_unit_interval():
    for src in ["output noise(7, 1)", "output voronoi(5, 2, 0.8)"]:
        state = _render([src], 24, 24, 11)
        assert state.image.min() >= 0 and state.image.max() <= 255


def test_program_ids_recorded():
    ast = dsl.parse("output rgb(0,0,0)")
    state = dsl.render([ast], RenderParams(2, 2, 0), program_ids=("abc",))
    assert state.program_ids == ("abc",)
