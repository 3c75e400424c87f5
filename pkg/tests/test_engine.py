"""Engine behaviour: rejection sampling, reversion, accounting, multi-domain."""

from __future__ import annotations

import pytest

from vrefine import dsl
from vrefine.dsl.render import RenderParams
from vrefine.engine import (Budget, DomainSpec, RefineResult, realize_candidate,
                            refine, refine_multi)
from vrefine.errors import ExecError, ExecutionFailed, InitError
from vrefine.evaluate import OracleMseEvaluator
from vrefine.executor import InProcessExecutor
from vrefine.generate import AdversarialGenerator, MockMutationGenerator
from vrefine.types import Intent, Program, SearchConfig

from conftest import corpus_program

INTENT = Intent(text="match the target image")
PARAMS = RenderParams(32, 32, 7)


def oracle_for(source: str) -> OracleMseEvaluator:
    state = dsl.render([dsl.parse(source)], PARAMS)
    return OracleMseEvaluator(state)


def perturbed_target(name: str, seed: int) -> tuple[Program, OracleMseEvaluator]:
    """Start program plus an oracle whose target is a literal-perturbed twin."""
    p0 = corpus_program(name)
    ast = dsl.parse(p0.source)
    target_src = dsl.mutate_tweak(ast, seed)
    target = dsl.render([dsl.parse(target_src)], PARAMS)
    return p0, OracleMseEvaluator(target)


# --- realize_candidate ---------------------------------------------------------

class ScriptedExecutor:
    """Fails according to a per-call script of ExecErrors / None."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = 0
        self.inner = InProcessExecutor()

    def execute(self, programs, params):
        self.calls += 1
        step = self.script.pop(0) if self.script else None
        if step is not None:
            raise ExecutionFailed(step)
        return self.inner.execute(programs, params)


def _build(source):
    return Program.create(source, "toy_texture",
                          parent=corpus_program("marble"), edit_kind="tweak")


def test_realize_valid_source_single_attempt():
    ex = InProcessExecutor()
    cand = realize_candidate("output rgb(1,0,0)", _build,
                             lambda p: ex.execute([p], PARAMS), retries=0,
                             regenerate=lambda k: "output rgb(0,1,0)")
    assert cand.ok and cand.attempts == 1


def test_realize_drops_after_retries_exhausted():
    err = ExecError(kind="runtime", message="nope")
    ex = ScriptedExecutor([err, err, err])
    cand = realize_candidate("output rgb(1,0,0)", _build,
                             lambda p: ex.execute([p], PARAMS), retries=2,
                             regenerate=lambda k: "output rgb(0,1,0)")
    assert not cand.ok
    assert cand.attempts == 3
    assert cand.error == err
    assert ex.calls == 3


def test_realize_fail_once_then_succeed():
    err = ExecError(kind="runtime", message="flaky")
    ex = ScriptedExecutor([err])
    regenerated = []

    def regenerate(k):
        regenerated.append(k)
        return "output rgb(0, 0, 1)"

    cand = realize_candidate("output rgb(1,0,0)", _build,
                             lambda p: ex.execute([p], PARAMS), retries=2,
                             regenerate=regenerate)
    assert cand.ok and cand.attempts == 2
    assert regenerated == [1]
    assert cand.program.source == "output rgb(0, 0, 1)"


# --- refine accounting -----------------------------------------------------------

def run_mock(name="marble", depth=4, branch=8, seed=3, target_seed=2024,
             **cfg_kwargs) -> tuple[RefineResult, OracleMseEvaluator]:
    p0, oracle = perturbed_target(name, target_seed)
    cfg = SearchConfig(depth=depth, branch=branch, seed=seed, retries=1,
                       **cfg_kwargs)
    result = refine(cfg, p0, INTENT, InProcessExecutor(),
                    MockMutationGenerator(seed=seed), oracle, params=PARAMS)
    return result, oracle


def test_four_by_eight_records_exactly_32_generator_calls():
    result, _ = run_mock(depth=4, branch=8)
    assert result.trace.generator_calls == 32
    for rec in result.trace.iterations:
        assert rec.generator_calls == 8
        assert rec.evaluator_queries <= 8          # pool of at most 9
        assert rec.mode == ("tweak" if rec.index % 2 == 1 else "leap")


def test_candidate_edit_kinds_follow_schedule():
    result, _ = run_mock(depth=4, branch=4)
    for rec in result.trace.iterations:
        for cand in rec.candidates:
            entry = result.trace.programs[cand.program_id]
            assert entry.edit_kind == rec.mode


def test_tweak_iterations_stay_in_neighborhood_of_incumbent():
    result, _ = run_mock(depth=4, branch=6)
    incumbent = result.trace.initial_id
    for rec in result.trace.iterations:
        if rec.mode == "tweak":
            inc_src = result.trace.source_of(incumbent)
            for cand in rec.candidates:
                assert dsl.is_tweak(inc_src, result.trace.source_of(cand.program_id))
        incumbent = rec.winner_id


def test_incumbent_mse_never_increases_with_reversion():
    result, oracle = run_mock(depth=6, branch=4)
    scores = [result.trace.initial_score] + \
        [rec.winner_score for rec in result.trace.iterations]
    for prev, cur in zip(scores, scores[1:]):
        assert cur <= prev
    assert result.trace.final_score == scores[-1]


def test_trace_is_byte_reproducible():
    a, _ = run_mock(depth=3, branch=5, seed=11)
    b, _ = run_mock(depth=3, branch=5, seed=11)
    assert a.trace.to_json() == b.trace.to_json()


def test_parallel_run_matches_serial_trace():
    serial, _ = run_mock(depth=3, branch=6, seed=13)
    parallel, _ = run_mock(depth=3, branch=6, seed=13, max_parallel=4)
    assert serial.trace.to_json() == parallel.trace.to_json()


def test_no_revert_with_adversarial_generator_diverges():
    p0, oracle = perturbed_target("marble", 77)
    cfg = SearchConfig(depth=4, branch=8, seed=5).with_flags(revert_enabled=False)
    result = refine(cfg, p0, INTENT, InProcessExecutor(),
                    AdversarialGenerator(seed=5), oracle, params=PARAMS)
    assert result.trace.final_score > result.trace.initial_score
    for rec in result.trace.iterations:
        assert not rec.reverted


def test_revert_defends_against_adversarial_generator():
    p0, oracle = perturbed_target("marble", 77)
    cfg = SearchConfig(depth=4, branch=8, seed=5)
    result = refine(cfg, p0, INTENT, InProcessExecutor(),
                    AdversarialGenerator(seed=5), oracle, params=PARAMS)
    assert result.trace.final_score == result.trace.initial_score
    assert all(rec.reverted for rec in result.trace.iterations)


def test_init_error_when_p0_fails():
    bad = Program.create("output nosuchfn(1)", "toy_texture")
    cfg = SearchConfig(depth=1, branch=1)
    with pytest.raises(InitError):
        refine(cfg, bad, INTENT, InProcessExecutor(),
               MockMutationGenerator(), oracle_for("output rgb(0,0,0)"),
               params=PARAMS)


# --- rejection sampling in the loop ------------------------------------------------

class FailSourcesExecutor:
    """Fails any program whose source is not the incumbent's.

    first_attempts_fail controls how many executions of each distinct
    source fail before succeeding (None = fail forever).
    """

    def __init__(self, allow: str, fail_count=None):
        self.allow = allow
        self.fail_count = fail_count
        self.seen: dict[str, int] = {}
        self.inner = InProcessExecutor()

    def execute(self, programs, params):
        source = programs[0].source
        if source != self.allow:
            n = self.seen.get(source, 0)
            self.seen[source] = n + 1
            if self.fail_count is None or n < self.fail_count:
                raise ExecutionFailed(ExecError(kind="runtime",
                                                message="injected failure"))
        return self.inner.execute(programs, params)


def test_all_candidates_dropped_reverts_with_zero_comparisons():
    p0 = corpus_program("marble")
    oracle = oracle_for(p0.source)
    cfg = SearchConfig(depth=1, branch=4, seed=2, retries=1)
    ex = FailSourcesExecutor(allow=p0.source)
    result = refine(cfg, p0, INTENT, ex, MockMutationGenerator(seed=2),
                    oracle, params=PARAMS)
    rec = result.trace.iterations[0]
    assert rec.winner_id == p0.id
    assert rec.reverted and not rec.failed
    assert rec.evaluator_queries == 0
    for cand in rec.candidates:
        assert not cand.ok
        assert cand.attempts == cfg.retries + 1


def test_empty_pool_without_revert_marks_iteration_failed():
    p0 = corpus_program("marble")
    oracle = oracle_for(p0.source)
    cfg = SearchConfig(depth=2, branch=3, seed=2, retries=0).with_flags(
        revert_enabled=False)
    ex = FailSourcesExecutor(allow=p0.source)
    result = refine(cfg, p0, INTENT, ex, MockMutationGenerator(seed=2),
                    oracle, params=PARAMS)
    for rec in result.trace.iterations:
        assert rec.failed and rec.reverted
        assert rec.winner_id == p0.id
        assert rec.evaluator_queries == 0
    assert result.best_program.id == p0.id


def test_dropped_candidates_never_reach_the_tournament():
    p0 = corpus_program("camo")
    oracle = oracle_for(p0.source)
    cfg = SearchConfig(depth=3, branch=5, seed=4, retries=1)
    ex = FailSourcesExecutor(allow=p0.source, fail_count=1)
    result = refine(cfg, p0, INTENT, ex, MockMutationGenerator(seed=4),
                    oracle, params=PARAMS)
    for rec in result.trace.iterations:
        ok = sum(1 for c in rec.candidates if c.ok)
        # pool = ok candidates + incumbent; a tournament makes n-1 comparisons
        assert rec.evaluator_queries == ok
        for cand in rec.candidates:
            if not cand.ok:
                assert cand.program_id != rec.winner_id


def test_retry_calls_tracked_separately():
    p0 = corpus_program("camo")
    oracle = oracle_for(p0.source)
    cfg = SearchConfig(depth=1, branch=4, seed=4, retries=2)
    ex = FailSourcesExecutor(allow=p0.source, fail_count=1)
    result = refine(cfg, p0, INTENT, ex, MockMutationGenerator(seed=4),
                    oracle, params=PARAMS)
    rec = result.trace.iterations[0]
    assert rec.generator_calls == 4
    assert rec.retry_calls >= 1


def test_budget_truncates_run():
    p0, oracle = perturbed_target("marble", 9)
    cfg = SearchConfig(depth=4, branch=8, seed=1)
    result = refine(cfg, p0, INTENT, InProcessExecutor(),
                    MockMutationGenerator(seed=1), oracle, params=PARAMS,
                    budget=Budget(max_generator_calls=16))
    assert result.trace.truncated
    assert len(result.trace.iterations) == 2
    assert result.trace.generator_calls == 16


# --- refine_multi -------------------------------------------------------------------

def _multi_domains(seed=3, depth=2, branch=4):
    tex = corpus_program("marble")
    post = corpus_program("soft_glow")
    target = InProcessExecutor().execute(
        [Program.create(dsl.mutate_tweak(dsl.parse(tex.source), 55),
                        "toy_texture"),
         Program.create(dsl.mutate_tweak(dsl.parse(post.source, dsl.KIND_POST), 56),
                        "toy_post")], PARAMS)
    oracle = OracleMseEvaluator(target)
    cfg = SearchConfig(depth=depth, branch=branch, seed=seed, retries=1)
    domains = [
        DomainSpec(cfg=cfg, p0=tex, generator=MockMutationGenerator(seed=seed),
                   evaluator=oracle),
        DomainSpec(cfg=cfg, p0=post,
                   generator=MockMutationGenerator(seed=seed + 1),
                   evaluator=oracle),
    ]
    return domains, oracle


def test_single_domain_multi_matches_refine_exactly():
    p0, oracle = perturbed_target("marble", 31)
    cfg = SearchConfig(depth=3, branch=4, seed=6, retries=1)
    single = refine(cfg, p0, INTENT, InProcessExecutor(),
                    MockMutationGenerator(seed=6), oracle, params=PARAMS)
    multi = refine_multi(
        [DomainSpec(cfg=cfg, p0=p0, generator=MockMutationGenerator(seed=6),
                    evaluator=oracle)],
        INTENT, InProcessExecutor(), rounds=1, params=PARAMS)
    assert len(multi.trace.entries) == 1
    assert multi.trace.entries[0].trace.to_json() == single.trace.to_json()
    assert multi.best_programs[0].id == single.best_program.id


def test_two_domain_composite_mse_non_increasing():
    domains, oracle = _multi_domains()
    result = refine_multi(domains, INTENT, InProcessExecutor(), rounds=1,
                          params=PARAMS)
    scores = []
    for entry in result.trace.entries:
        scores.append((entry.trace.initial_score, entry.trace.final_score))
    # within each sub-refinement the composite oracle score cannot rise
    for initial, final in scores:
        assert final <= initial
    # and the next sub-refinement starts where the previous one ended
    assert scores[1][0] == scores[0][1]


def test_multi_round_accounting():
    domains, _ = _multi_domains(depth=2, branch=3)
    result = refine_multi(domains, INTENT, InProcessExecutor(), rounds=2,
                          params=PARAMS)
    expected = 2 * sum(d.cfg.depth * d.cfg.branch for d in domains)
    assert result.trace.generator_calls == expected
    assert len(result.trace.entries) == 4


def test_multi_requires_domains_and_rounds():
    with pytest.raises(ValueError):
        refine_multi([], INTENT, InProcessExecutor())
    domains, _ = _multi_domains()
    with pytest.raises(ValueError):
        refine_multi(domains, INTENT, InProcessExecutor(), rounds=0)
