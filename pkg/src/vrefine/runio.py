"""Run directory layout (documented in docs/trace.md):

    <out>/
      trace.json                    single JSON document; images by relative path
      initial.png
      imagined_00.png ...           when imagination ran
      final_program.txt             (final_program_<i>.txt per domain for multi)
      iter_01/cand_00.png ...       successful candidates
      iter_01/winner.png
      round_1_domain_0/...          multi runs nest the same layout per entry
"""

from __future__ import annotations

import json
from pathlib import Path

from .engine import MultiResult, RefineResult, RunArtifacts
from .imaging import save_png


def _write_iterations(doc_iterations: list, artifacts: RunArtifacts,
                      base: Path, rel_prefix: str) -> None:
    for images, iter_doc in zip(artifacts.iterations, doc_iterations):
        iter_dir = base / f"iter_{images.index:02d}"
        iter_dir.mkdir(parents=True, exist_ok=True)
        for cand_doc in iter_doc["candidates"]:
            state = images.candidates.get(cand_doc["slot"])
            if state is None:
                continue
            name = f"iter_{images.index:02d}/cand_{cand_doc['slot']:02d}.png"
            save_png(state.image, base / name)
            cand_doc["image_path"] = rel_prefix + name
        winner_name = f"iter_{images.index:02d}/winner.png"
        save_png(images.winner.image, base / winner_name)
        iter_doc["winner_image_path"] = rel_prefix + winner_name


def _write_imagined(doc: dict, imagined, base: Path) -> None:
    paths = []
    for i, image in enumerate(imagined):
        name = f"imagined_{i:02d}.png"
        save_png(image, base / name)
        paths.append(name)
    doc["imagined_image_paths"] = paths


def save_run(result: RefineResult, out_dir) -> Path:
    """Write a single-program run; returns the trace.json path."""
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    doc = result.trace.to_dict()
    if result.artifacts.initial is not None:
        save_png(result.artifacts.initial.image, base / "initial.png")
        doc["initial"]["image_path"] = "initial.png"
    _write_imagined(doc, result.artifacts.imagined, base)
    _write_iterations(doc["iterations"], result.artifacts, base, "")
    (base / "final_program.txt").write_text(
        result.best_program.source, encoding="utf-8")
    trace_path = base / "trace.json"
    trace_path.write_text(json.dumps(doc, indent=2, sort_keys=True),
                          encoding="utf-8")
    return trace_path


def save_multi_run(result: MultiResult, out_dir) -> Path:
    """Write a multi-domain run; returns the trace.json path."""
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    doc = result.trace.to_dict()
    _write_imagined(doc, result.imagined, base)
    by_key = {(rnd, dom): artifacts for rnd, dom, artifacts in result.artifacts}
    for entry_doc in doc["entries"]:
        key = (entry_doc["round"], entry_doc["domain"])
        sub = f"round_{key[0]}_domain_{key[1]}"
        sub_dir = base / sub
        sub_dir.mkdir(parents=True, exist_ok=True)
        artifacts = by_key[key]
        if artifacts.initial is not None:
            save_png(artifacts.initial.image, sub_dir / "initial.png")
            entry_doc["trace"]["initial"]["image_path"] = f"{sub}/initial.png"
        _write_iterations(entry_doc["trace"]["iterations"], artifacts,
                          sub_dir, f"{sub}/")
    for i, prog in enumerate(result.best_programs):
        (base / f"final_program_{i}.txt").write_text(prog.source,
                                                     encoding="utf-8")
    save_png(result.best_state.image, base / "final.png")
    trace_path = base / "trace.json"
    trace_path.write_text(json.dumps(doc, indent=2, sort_keys=True),
                          encoding="utf-8")
    return trace_path
