"""Domain value objects and the run trace.

Everything here is an immutable value object, safe to share across
threads.  Traces are assembled by a single writer (the engine) and
serialize to one JSON document; images are referenced by relative PNG
paths filled in when a run directory is written.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, ExecError

DOMAIN_TAGS = ("material", "lighting", "geometry", "toy_texture", "toy_post")
EDIT_KINDS = ("initial", "tweak", "leap")
EDIT_MODES = ("tweak", "leap")

MAX_SEED = (1 << 64) - 1


def program_id(source: str, parent_id: Optional[str]) -> str:
    """Content-addressed id: sha256 over source + parent id, 16 hex chars."""
    h = hashlib.sha256()
    h.update(source.encode("utf-8"))
    h.update(b"\x00")
    h.update((parent_id or "").encode("utf-8"))
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class Program:
    """One editable visual program: source text plus lineage."""

    id: str
    domain_tag: str
    source: str
    parent_id: Optional[str] = None
    edit_kind: str = "initial"

    def __post_init__(self):
        if not self.source:
            raise ValueError("Program source must be non-empty")
        if self.domain_tag not in DOMAIN_TAGS:
            raise ValueError(f"unknown domain_tag: {self.domain_tag!r}")
        if self.edit_kind not in EDIT_KINDS:
            raise ValueError(f"unknown edit_kind: {self.edit_kind!r}")
        if (self.parent_id is None) != (self.edit_kind == "initial"):
            raise ValueError("parent_id must be absent iff edit_kind is 'initial'")

    @staticmethod
    def create(source: str, domain_tag: str, parent: Optional["Program"] = None,
               edit_kind: str = "initial") -> "Program":
        pid = parent.id if parent is not None else None
        return Program(id=program_id(source, pid), domain_tag=domain_tag,
                       source=source, parent_id=pid, edit_kind=edit_kind)


@dataclass(frozen=True, eq=False)
class VisualState:
    """Rendered raster (H x W x 3, RGB8, row-major, top-left origin)."""

    image: np.ndarray
    width: int
    height: int
    seed: int
    program_ids: tuple[str, ...]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")
        img = np.ascontiguousarray(self.image, dtype=np.uint8)
        if img.shape != (self.height, self.width, 3):
            raise ValueError(
                f"image shape {img.shape} != {(self.height, self.width, 3)}")
        img.flags.writeable = False
        object.__setattr__(self, "image", img)
        object.__setattr__(self, "program_ids", tuple(self.program_ids))

    def digest(self) -> str:
        """sha256 of the raw pixel buffer."""
        return hashlib.sha256(self.image.tobytes()).hexdigest()


@dataclass(frozen=True)
class Intent:
    """User goal: text plus optional reference / imagined images."""

    text: str
    reference_images: tuple[np.ndarray, ...] = ()
    imagined_images: tuple[np.ndarray, ...] = ()
    expanded_text: Optional[str] = None

    def __post_init__(self):
        if not self.text:
            raise ValueError("Intent text must be non-empty")
        object.__setattr__(self, "reference_images", tuple(self.reference_images))
        object.__setattr__(self, "imagined_images", tuple(self.imagined_images))
        if self.reference_images and self.imagined_images:
            raise ValueError(
                "imagined_images must be empty when reference_images are given")

    def guide_images(self) -> tuple[np.ndarray, ...]:
        """Images handed to generators/evaluators: references, else imagined."""
        return self.reference_images if self.reference_images else self.imagined_images

    def effective_text(self) -> str:
        return self.expanded_text if self.expanded_text else self.text


def default_schedule(depth: int) -> tuple[str, ...]:
    """Alternating edit modes starting with tweak: iteration i (1-based) is
    tweak iff i is odd."""
    return tuple("tweak" if i % 2 == 1 else "leap" for i in range(1, depth + 1))


@dataclass(frozen=True)
class Flags:
    revert_enabled: bool = True
    imagination_enabled: bool = True
    gen_vision_enabled: bool = True
    eval_vision_enabled: bool = True


@dataclass(frozen=True)
class SearchConfig:
    """Search dimensions and ablation switches for one refinement run."""

    depth: int = 4
    branch: int = 8
    schedule: Optional[tuple[str, ...]] = None
    retries: int = 1
    eval_retries: int = 1
    seed: int = 0
    flags: Flags = field(default_factory=Flags)
    max_parallel: int = 1

    def __post_init__(self):
        if self.schedule is None and self.depth >= 1:
            object.__setattr__(self, "schedule", default_schedule(self.depth))
        elif self.schedule is not None:
            object.__setattr__(self, "schedule", tuple(self.schedule))

    def with_flags(self, **kwargs) -> "SearchConfig":
        return replace(self, flags=replace(self.flags, **kwargs))


def validate_config(cfg: SearchConfig) -> None:
    """Raise ConfigError on the first violated invariant."""
    if cfg.depth < 1:
        raise ConfigError("depth", f"must be >= 1, got {cfg.depth}")
    if cfg.branch < 1:
        raise ConfigError("branch", f"must be >= 1, got {cfg.branch}")
    if cfg.schedule is None or len(cfg.schedule) != cfg.depth:
        got = 0 if cfg.schedule is None else len(cfg.schedule)
        raise ConfigError("schedule", f"length {got} != depth {cfg.depth}")
    for mode in cfg.schedule:
        if mode not in EDIT_MODES:
            raise ConfigError("schedule", f"unknown edit mode {mode!r}")
    if cfg.retries < 0:
        raise ConfigError("retries", "must be >= 0")
    if cfg.eval_retries < 0:
        raise ConfigError("eval_retries", "must be >= 0")
    if not (0 <= cfg.seed <= MAX_SEED):
        raise ConfigError("seed", "must fit in unsigned 64 bits")
    if cfg.max_parallel < 1:
        raise ConfigError("max_parallel", "must be >= 1")


@dataclass(frozen=True)
class EditCandidate:
    """One realized hypothesis: either a rendered state or a classified error."""

    program: Program
    state: Optional[VisualState] = None
    error: Optional[ExecError] = None
    attempts: int = 1

    def __post_init__(self):
        if (self.state is None) == (self.error is None):
            raise ValueError("exactly one of state/error must be set")
        if self.attempts < 1:
            raise ValueError("attempts must be >= 1")

    @property
    def ok(self) -> bool:
        return self.state is not None


@dataclass(frozen=True)
class CandidateRecord:
    """Trace entry for one candidate slot."""

    slot: int
    program_id: str
    attempts: int
    ok: bool
    error: Optional[ExecError] = None
    score: Optional[float] = None
    image_path: Optional[str] = None

    def to_dict(self) -> dict:
        d = {"slot": self.slot, "program_id": self.program_id,
             "attempts": self.attempts, "ok": self.ok}
        if self.error is not None:
            d["error"] = self.error.to_dict()
        if self.score is not None:
            d["score"] = self.score
        if self.image_path is not None:
            d["image_path"] = self.image_path
        return d


@dataclass(frozen=True)
class IterationRecord:
    """What happened in one refinement iteration."""

    index: int                      # 1-based
    mode: str                       # schedule[index-1]
    candidates: tuple[CandidateRecord, ...]
    winner_id: str
    reverted: bool                  # winner is the incumbent
    failed: bool                    # pool was empty; incumbent kept by default
    evaluator_queries: int
    generator_calls: int
    retry_calls: int
    executor_runs: int
    winner_score: Optional[float] = None
    incumbent_score: Optional[float] = None
    winner_image_path: Optional[str] = None

    def to_dict(self) -> dict:
        d = {
            "index": self.index,
            "mode": self.mode,
            "candidates": [c.to_dict() for c in self.candidates],
            "winner_id": self.winner_id,
            "reverted": self.reverted,
            "failed": self.failed,
            "evaluator_queries": self.evaluator_queries,
            "generator_calls": self.generator_calls,
            "retry_calls": self.retry_calls,
            "executor_runs": self.executor_runs,
        }
        if self.winner_score is not None:
            d["winner_score"] = self.winner_score
        if self.incumbent_score is not None:
            d["incumbent_score"] = self.incumbent_score
        if self.winner_image_path is not None:
            d["winner_image_path"] = self.winner_image_path
        return d


@dataclass(frozen=True)
class ProgramEntry:
    source: str
    domain_tag: str
    parent_id: Optional[str]
    edit_kind: str

    def to_dict(self) -> dict:
        return {"source": self.source, "domain_tag": self.domain_tag,
                "parent_id": self.parent_id, "edit_kind": self.edit_kind}


@dataclass(frozen=True)
class SearchTrace:
    """Complete record of a refinement run.

    ``programs`` maps every program id seen during the run to its source
    and lineage, so traces are replayable without external files.
    """

    seed: int
    depth: int
    branch: int
    schedule: tuple[str, ...]
    initial_id: str
    final_id: str
    iterations: tuple[IterationRecord, ...]
    programs: dict[str, ProgramEntry]
    truncated: bool = False
    initial_score: Optional[float] = None
    final_score: Optional[float] = None
    imagined_image_paths: tuple[str, ...] = ()

    @property
    def generator_calls(self) -> int:
        return sum(rec.generator_calls for rec in self.iterations)

    @property
    def retry_calls(self) -> int:
        return sum(rec.retry_calls for rec in self.iterations)

    @property
    def evaluator_queries(self) -> int:
        return sum(rec.evaluator_queries for rec in self.iterations)

    @property
    def executor_runs(self) -> int:
        return sum(rec.executor_runs for rec in self.iterations)

    def source_of(self, pid: str) -> str:
        return self.programs[pid].source

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "kind": "single",
            "seed": self.seed,
            "depth": self.depth,
            "branch": self.branch,
            "schedule": list(self.schedule),
            "initial": {"program_id": self.initial_id, "score": self.initial_score},
            "final": {"program_id": self.final_id, "score": self.final_score},
            "totals": {
                "generator_calls": self.generator_calls,
                "retry_calls": self.retry_calls,
                "evaluator_queries": self.evaluator_queries,
                "executor_runs": self.executor_runs,
            },
            "truncated": self.truncated,
            "imagined_image_paths": list(self.imagined_image_paths),
            "iterations": [rec.to_dict() for rec in self.iterations],
            "programs": {pid: entry.to_dict()
                         for pid, entry in sorted(self.programs.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def trace_from_dict(doc: dict) -> SearchTrace:
    """Rebuild a SearchTrace from its JSON document (images stay on disk)."""
    iterations = []
    for rec in doc["iterations"]:
        cands = tuple(
            CandidateRecord(
                slot=c["slot"], program_id=c["program_id"],
                attempts=c["attempts"], ok=c["ok"],
                error=ExecError(**c["error"]) if "error" in c else None,
                score=c.get("score"), image_path=c.get("image_path"))
            for c in rec["candidates"])
        iterations.append(IterationRecord(
            index=rec["index"], mode=rec["mode"], candidates=cands,
            winner_id=rec["winner_id"], reverted=rec["reverted"],
            failed=rec["failed"], evaluator_queries=rec["evaluator_queries"],
            generator_calls=rec["generator_calls"], retry_calls=rec["retry_calls"],
            executor_runs=rec["executor_runs"],
            winner_score=rec.get("winner_score"),
            incumbent_score=rec.get("incumbent_score"),
            winner_image_path=rec.get("winner_image_path")))
    programs = {pid: ProgramEntry(**entry)
                for pid, entry in doc["programs"].items()}
    return SearchTrace(
        seed=doc["seed"], depth=doc["depth"], branch=doc["branch"],
        schedule=tuple(doc["schedule"]),
        initial_id=doc["initial"]["program_id"], final_id=doc["final"]["program_id"],
        iterations=tuple(iterations), programs=programs,
        truncated=doc["truncated"],
        initial_score=doc["initial"]["score"], final_score=doc["final"]["score"],
        imagined_image_paths=tuple(doc.get("imagined_image_paths", ())))
