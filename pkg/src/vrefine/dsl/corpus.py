"""Access to the bundled sample programs (``corpus/*.vtx``)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .nodes import KIND_POST
from .parser import infer_kind

_CORPUS = resources.files(__package__) / "corpus"

# toy_texture / toy_post tags used when wrapping corpus sources in Programs.
DOMAIN_FOR_KIND = {"texture": "toy_texture", "post": "toy_post"}


def corpus_names() -> list[str]:
    """Sorted program names (file stems)."""
    return sorted(p.name[:-4] for p in _CORPUS.iterdir() if p.name.endswith(".vtx"))


def corpus_path(name: str) -> Path:
    path = Path(str(_CORPUS / f"{name}.vtx"))
    if not path.is_file():
        raise FileNotFoundError(f"no corpus program named {name!r}")
    return path


def load_corpus(name: str) -> tuple[str, str]:
    """Return (source, domain_tag) for a corpus program."""
    source = corpus_path(name).read_text(encoding="utf-8")
    kind = infer_kind(source)
    return source, DOMAIN_FOR_KIND[kind]


def texture_names() -> list[str]:
    return [n for n in corpus_names() if load_corpus(n)[1] == "toy_texture"]


def post_names() -> list[str]:
    return [n for n in corpus_names() if load_corpus(n)[1] == "toy_post"]
