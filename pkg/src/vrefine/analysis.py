"""Post-hoc analysis: edit-size statistics, the d x b sweep, reporting.

``diff_stats`` measures line-level edits through a longest-common-
subsequence alignment.  Among maximum-length alignments, ties break
toward the one that matches the most characters, which makes the
character counts well-defined and symmetric; char counts are the total
characters of added/deleted lines (newlines excluded, lines split with
``str.splitlines``).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from .engine import refine
from .types import Intent, Program, SearchConfig, SearchTrace, trace_from_dict


@dataclass(frozen=True)
class DiffStats:
    lines_added: int
    lines_deleted: int
    chars_added: int
    chars_deleted: int

    def to_dict(self) -> dict:
        return {"lines_added": self.lines_added,
                "lines_deleted": self.lines_deleted,
                "chars_added": self.chars_added,
                "chars_deleted": self.chars_deleted}

    @property
    def total_chars(self) -> int:
        return self.chars_added + self.chars_deleted


def _lcs_value(a: list[str], b: list[str]) -> tuple[int, int]:
    """(matched line count, matched character count), lexicographic max."""
    n, m = len(a), len(b)
    prev = [(0, 0)] * (m + 1)
    for i in range(1, n + 1):
        cur = [(0, 0)] * (m + 1)
        line = a[i - 1]
        for j in range(1, m + 1):
            best = prev[j] if prev[j] >= cur[j - 1] else cur[j - 1]
            if line == b[j - 1]:
                matched = (prev[j - 1][0] + 1, prev[j - 1][1] + len(line))
                if matched > best:
                    best = matched
            cur[j] = best
        prev = cur
    return prev[m]


def diff_stats(prev: Program | str, next: Program | str) -> DiffStats:
    """Line/character add/delete counts between two program sources."""
    prev_src = prev.source if isinstance(prev, Program) else prev
    next_src = next.source if isinstance(next, Program) else next
    a = prev_src.splitlines()
    b = next_src.splitlines()
    matched_lines, matched_chars = _lcs_value(a, b)
    a_chars = sum(len(line) for line in a)
    b_chars = sum(len(line) for line in b)
    return DiffStats(
        lines_added=len(b) - matched_lines,
        lines_deleted=len(a) - matched_lines,
        chars_added=b_chars - matched_chars,
        chars_deleted=a_chars - matched_chars)


# --- dimension sweep ---------------------------------------------------------

def factorizations(total: int) -> list[tuple[int, int]]:
    """All (depth, branch) pairs with depth * branch == total, depth ascending."""
    if total < 1:
        raise ValueError("total must be >= 1")
    return [(d, total // d) for d in range(1, total + 1) if total % d == 0]


def sweep_dimensions(total: int, p0: Program, intent: Intent,
                     make_executor: Callable[[], object],
                     make_generator: Callable[[int], object],
                     make_evaluator: Callable[[], object],
                     seed: int = 0, retries: int = 1, params=None,
                     flags=None) -> list[dict]:
    """Run one refinement per (d, b) factorization of ``total``.

    Every run gets a fresh executor and generator; rows where the run
    raises carry the error message and the sweep continues.
    """
    rows = []
    for depth, branch in factorizations(total):
        row = {"depth": depth, "branch": branch, "generator_calls": None,
               "initial_score": None, "final_score": None, "reverted_iterations": None,
               "error": None}
        cfg = SearchConfig(depth=depth, branch=branch, seed=seed,
                           retries=retries)
        if flags is not None:
            cfg = SearchConfig(depth=depth, branch=branch, seed=seed,
                               retries=retries, flags=flags)
        try:
            result = refine(cfg, p0, intent, make_executor(),
                            make_generator(seed), make_evaluator(),
                            params=params)
            trace = result.trace
            row.update(generator_calls=trace.generator_calls,
                       initial_score=trace.initial_score,
                       final_score=trace.final_score,
                       reverted_iterations=sum(
                           1 for rec in trace.iterations if rec.reverted))
        except Exception as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


SWEEP_FIELDS = ("depth", "branch", "generator_calls", "initial_score",
                "final_score", "reverted_iterations", "error")


def write_sweep(rows: Sequence[dict], out_dir) -> tuple[Path, Path]:
    """Write sweep results as CSV and JSON; returns both paths."""
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    csv_path = base / "sweep.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS)
        writer.writeheader()
        writer.writerows({k: row.get(k) for k in SWEEP_FIELDS} for row in rows)
    json_path = base / "sweep.json"
    json_path.write_text(json.dumps(list(rows), indent=2), encoding="utf-8")
    return csv_path, json_path


# --- report --------------------------------------------------------------------

def _fmt_score(value: Optional[float]) -> str:
    return f"{value:.6f}" if value is not None else "-"


def report(trace: SearchTrace, out_dir, trace_doc: Optional[dict] = None) -> Path:
    """Write summary.md (one row per iteration) and a gallery index.

    ``trace_doc`` supplies image paths when the trace came from a run
    directory's trace.json; pass the parsed document to link images.
    """
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    lines = ["# Refinement run", ""]
    lines.append(f"- seed: {trace.seed}, depth: {trace.depth}, "
                 f"branch: {trace.branch}")
    lines.append(f"- schedule: {', '.join(trace.schedule)}")
    lines.append(f"- generator calls: {trace.generator_calls} "
                 f"(+{trace.retry_calls} retries), evaluator queries: "
                 f"{trace.evaluator_queries}, executor runs: {trace.executor_runs}")
    lines.append(f"- initial score: {_fmt_score(trace.initial_score)}, "
                 f"final score: {_fmt_score(trace.final_score)}"
                 + (", truncated" if trace.truncated else ""))
    lines.append("")
    lines.append("| iter | mode | winner | reverted | score | +lines | -lines "
                 "| +chars | -chars |")
    lines.append("|-----:|------|--------|----------|-------|-------:|-------:"
                 "|-------:|-------:|")
    incumbent = trace.initial_id
    for rec in trace.iterations:
        stats = diff_stats(trace.source_of(incumbent),
                           trace.source_of(rec.winner_id))
        flag = "yes" if rec.reverted else ("FAILED" if rec.failed else "no")
        lines.append(
            f"| {rec.index} | {rec.mode} | `{rec.winner_id}` | {flag} "
            f"| {_fmt_score(rec.winner_score)} | {stats.lines_added} "
            f"| {stats.lines_deleted} | {stats.chars_added} "
            f"| {stats.chars_deleted} |")
        incumbent = rec.winner_id
    summary_path = base / "summary.md"
    summary_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    gallery = ["# Gallery", ""]
    doc_iters = (trace_doc or {}).get("iterations", [])
    paths_by_index = {it["index"]: it for it in doc_iters}
    for rec in trace.iterations:
        gallery.append(f"## Iteration {rec.index} ({rec.mode})")
        doc_iter = paths_by_index.get(rec.index, {})
        winner_path = doc_iter.get("winner_image_path") or rec.winner_image_path
        if winner_path:
            gallery.append(f"Winner: ![winner]({winner_path})")
        for cand in doc_iter.get("candidates", []):
            if cand.get("image_path"):
                gallery.append(f"![cand {cand['slot']}]({cand['image_path']})")
        gallery.append("")
    (base / "gallery.md").write_text("\n".join(gallery) + "\n", encoding="utf-8")
    return summary_path


def report_run_dir(run_dir) -> Path:
    """Report straight from a run directory containing trace.json."""
    run_dir = Path(run_dir)
    doc = json.loads((run_dir / "trace.json").read_text(encoding="utf-8"))
    if doc.get("kind") == "multi":
        raise ValueError("report expects a single-program trace; "
                         "multi traces carry one per entry")
    trace = trace_from_dict(doc)
    return report(trace, run_dir, trace_doc=doc)
