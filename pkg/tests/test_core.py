"""Core types: invariants, config validation, trace round-trip."""

from __future__ import annotations

import numpy as np
import pytest

from vrefine.errors import ConfigError, ExecError
from vrefine.types import (EditCandidate, Flags, Intent, Program, SearchConfig,
                           VisualState, default_schedule, program_id,
                           validate_config)


def test_program_requires_source():
    with pytest.raises(ValueError):
        Program.create("", "toy_texture")


def test_program_parent_iff_not_initial():
    root = Program.create("output rgb(1,0,0)", "toy_texture")
    assert root.parent_id is None
    child = Program.create("output rgb(0,1,0)", "toy_texture", parent=root,
                           edit_kind="tweak")
    assert child.parent_id == root.id
    with pytest.raises(ValueError):
        Program(id="x", domain_tag="toy_texture", source="s", parent_id=None,
                edit_kind="tweak")
    with pytest.raises(ValueError):
        Program(id="x", domain_tag="toy_texture", source="s", parent_id="p",
                edit_kind="initial")


def test_program_id_is_content_addressed():
    a = Program.create("output rgb(1,0,0)", "toy_texture")
    b = Program.create("output rgb(1,0,0)", "toy_texture")
    assert a.id == b.id == program_id("output rgb(1,0,0)", None)
    child = Program.create("output rgb(1,0,0)", "toy_texture", parent=a,
                           edit_kind="leap")
    assert child.id != a.id


def test_visual_state_shape_checked():
    img = np.zeros((2, 3, 3), dtype=np.uint8)
    state = VisualState(image=img, width=3, height=2, seed=0, program_ids=("a",))
    assert state.digest() == VisualState(image=img, width=3, height=2, seed=0,
                                         program_ids=("a",)).digest()
    with pytest.raises(ValueError):
        VisualState(image=img, width=2, height=3, seed=0, program_ids=())
    with pytest.raises(ValueError):
        VisualState(image=img, width=0, height=2, seed=0, program_ids=())


def test_visual_state_is_immutable():
    state = VisualState(image=np.zeros((1, 1, 3), dtype=np.uint8), width=1,
                        height=1, seed=0, program_ids=())
    with pytest.raises(ValueError):
        state.image[0, 0, 0] = 5


def test_intent_invariants():
    with pytest.raises(ValueError):
        Intent(text="")
    ref = np.zeros((1, 1, 3), dtype=np.uint8)
    with pytest.raises(ValueError):
        Intent(text="x", reference_images=(ref,), imagined_images=(ref,))
    it = Intent(text="x", reference_images=(ref,))
    assert it.guide_images() == (ref,)


def test_default_schedule_alternates_starting_tweak():
    assert default_schedule(1) == ("tweak",)
    assert default_schedule(4) == ("tweak", "leap", "tweak", "leap")
    assert default_schedule(5)[4] == "tweak"


def test_validate_config_accepts_paper_dimensions():
    validate_config(SearchConfig(depth=4, branch=8))


def test_validate_config_rejects_zero_branch():
    with pytest.raises(ConfigError) as exc:
        validate_config(SearchConfig(depth=4, branch=0))
    assert exc.value.field == "branch"


def test_validate_config_rejects_schedule_length_mismatch():
    with pytest.raises(ConfigError) as exc:
        validate_config(SearchConfig(depth=3, branch=2, schedule=("tweak", "leap")))
    assert exc.value.field == "schedule"


def test_validate_config_rejects_bad_mode_and_negatives():
    with pytest.raises(ConfigError):
        validate_config(SearchConfig(depth=1, branch=1, schedule=("hop",)))
    with pytest.raises(ConfigError):
        validate_config(SearchConfig(retries=-1))
    with pytest.raises(ConfigError):
        validate_config(SearchConfig(max_parallel=0))
    with pytest.raises(ConfigError):
        validate_config(SearchConfig(seed=1 << 64))


def test_flags_toggle():
    cfg = SearchConfig().with_flags(revert_enabled=False)
    assert not cfg.flags.revert_enabled
    assert cfg.flags.imagination_enabled


def test_edit_candidate_exactly_one_of_state_error():
    prog = Program.create("output rgb(1,0,0)", "toy_texture")
    err = ExecError(kind="runtime", message="boom")
    with pytest.raises(ValueError):
        EditCandidate(program=prog)
    with pytest.raises(ValueError):
        EditCandidate(program=prog, state="s", error=err)
    cand = EditCandidate(program=prog, error=err, attempts=2)
    assert not cand.ok


def test_exec_error_kind_checked():
    with pytest.raises(ValueError):
        ExecError(kind="weird", message="m")
    with pytest.raises(ValueError):
        ExecError(kind="runtime", message="")
