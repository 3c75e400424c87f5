"""Edit generator backends, code extraction, intent expansion."""

from __future__ import annotations

import pytest

from vrefine import dsl
from vrefine.generate import (AdversarialGenerator, MockMutationGenerator,
                              VlmChatGenerator, expand_intent, extract_code,
                              propose)
from vrefine.templates import load_templates
from vrefine.types import Intent
from vrefine.vlm import ChatClient

from conftest import corpus_program, render_source
from fake_vlm import FakeVlmServer, count_images, message_texts

INTENT = Intent(text="a slab of veined marble")


# --- extract_code -------------------------------------------------------------

def test_extract_single_fenced_block():
    text = "here you go: ```\noutput rgb(1,0,0)\n```"
    assert extract_code(text) == "output rgb(1,0,0)"


def test_extract_without_fences_trims():
    assert extract_code("  output rgb(1,0,0)\n") == "output rgb(1,0,0)"


def test_extract_first_of_two_blocks():
    text = "```\nfirst\n```\nand\n```\nsecond\n```"
    assert extract_code(text) == "first"


def test_extract_with_language_tag():
    assert extract_code("```python\nx = 1\noutput x\n```") == "x = 1\noutput x"


# --- mock backend ----------------------------------------------------------------

def test_mock_tweak_proposals_stay_in_neighborhood():
    prog = corpus_program("marble")
    state = render_source(prog.source)
    texts = propose(MockMutationGenerator(seed=3), prog, state, INTENT, 8, "tweak")
    assert len(texts) == 8
    for text in texts:
        assert dsl.is_tweak(prog.source, text)


def test_mock_leap_proposals_parse_and_typecheck():
    prog = corpus_program("camo")
    texts = propose(MockMutationGenerator(seed=4), prog, None, INTENT, 4, "leap")
    for text in texts:
        dsl.parse(text, kind=dsl.KIND_TEXTURE)


def test_mock_is_pure_function_of_inputs():
    prog = corpus_program("rust")
    gen = MockMutationGenerator(seed=9)
    a = propose(gen, prog, None, INTENT, 6, "tweak")
    b = propose(MockMutationGenerator(seed=9), prog, None, INTENT, 6, "tweak")
    assert a == b
    c = propose(MockMutationGenerator(seed=10), prog, None, INTENT, 6, "tweak")
    assert a != c


def test_mock_attempts_give_fresh_samples():
    prog = corpus_program("ice")
    gen = MockMutationGenerator(seed=1)
    first = gen.propose_one(prog, None, INTENT, "leap", slot=0, attempt=0)
    retry = gen.propose_one(prog, None, INTENT, "leap", slot=0, attempt=1)
    assert first != retry


def test_propose_validates_inputs():
    prog = corpus_program("marble")
    with pytest.raises(ValueError):
        propose(MockMutationGenerator(), prog, None, INTENT, 0, "tweak")
    with pytest.raises(ValueError):
        propose(MockMutationGenerator(), prog, None, INTENT, 2, "wiggle")


def test_adversarial_generator_emits_flat_colors():
    prog = corpus_program("marble")
    texts = propose(AdversarialGenerator(seed=2), prog, None, INTENT, 8, "tweak")
    for text in texts:
        assert text.startswith("output rgb(")


# --- vlm backend --------------------------------------------------------------------

def _vlm_generator(server, **kwargs):
    client = ChatClient(endpoint=server.url, model="fake", api_key="k")
    return VlmChatGenerator(client=client, **kwargs)


def test_vlm_response_code_extracted():
    with FakeVlmServer(["here you go: ```\noutput rgb(1,0,0)\n```"]) as server:
        gen = _vlm_generator(server)
        prog = corpus_program("solid_red")
        out = gen.propose_one(prog, None, INTENT, "tweak", slot=0)
        assert out == "output rgb(1,0,0)"


def test_vlm_vision_attaches_render_and_guide_images():
    with FakeVlmServer(["```\noutput rgb(0,0,0)\n```"]) as server:
        gen = _vlm_generator(server, vision_enabled=True)
        prog = corpus_program("solid_red")
        state = render_source(prog.source)
        guide = render_source("output rgb(0,1,0)")
        intent = Intent(text="x", reference_images=(guide.image,))
        gen.propose_one(prog, state, intent, "leap", slot=0)
        assert count_images(server.requests[0]) == 2


def test_vlm_no_vision_sends_text_only():
    with FakeVlmServer(["```\noutput rgb(0,0,0)\n```"]) as server:
        gen = _vlm_generator(server, vision_enabled=False)
        prog = corpus_program("solid_red")
        state = render_source(prog.source)
        gen.propose_one(prog, state, INTENT, "tweak", slot=0)
        assert count_images(server.requests[0]) == 0


def test_vlm_prompt_carries_mode_instructions():
    with FakeVlmServer(["```\nx\n```", "```\nx\n```"]) as server:
        gen = _vlm_generator(server, vision_enabled=False)
        prog = corpus_program("solid_red")
        gen.propose_one(prog, None, INTENT, "tweak", slot=0)
        gen.propose_one(prog, None, INTENT, "leap", slot=0)
        tweak_prompt = "\n".join(message_texts(server.requests[0]))
        leap_prompt = "\n".join(message_texts(server.requests[1]))
        assert "numeric literal" in tweak_prompt
        assert "structural" in leap_prompt.lower()


# --- templates ------------------------------------------------------------------------

def test_image_grounded_templates_have_three_stages():
    templates = load_templates()
    for name in ("generator_tweak_vision", "generator_leap_vision"):
        text = templates.templates[name]
        assert "visual differences" in text       # difference enumeration
        assert "line" in text                     # line localization
        assert "fenced code block" in text        # code emission


def test_template_override(tmp_path):
    (tmp_path / "expand_intent.txt").write_text("say {intent_text} back")
    templates = load_templates(str(tmp_path))
    assert templates.render("expand_intent", intent_text="hi") == "say hi back"


# --- expand_intent -----------------------------------------------------------------------

def test_expand_intent_mock_echoes():
    intent = Intent(text="damascus steel")
    out = expand_intent(MockMutationGenerator(), intent)
    assert out.expanded_text == "damascus steel"
    assert out.text == "damascus steel"


def test_expand_intent_vlm_sets_expanded_text():
    detail = ("Present a sleek, matte finish with fine, unidirectional satin "
              "lines in shades of silver.")
    with FakeVlmServer([detail]) as server:
        gen = _vlm_generator(server)
        out = expand_intent(gen, Intent(text="brushed aluminum"))
        assert out.expanded_text == detail
        assert out.text == "brushed aluminum"


def test_expand_intent_requires_text():
    with pytest.raises(ValueError):
        Intent(text="")
