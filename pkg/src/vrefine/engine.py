"""The refinement loops.

``refine`` is the single-program iterative loop: each iteration asks the
generator for ``b`` hypotheses in the scheduled edit mode, realizes them
with rejection sampling (failed executions are regenerated up to R times,
then dropped), pools the survivors with the incumbent when reversion is
enabled, and crowns the tournament winner as the new incumbent.

``refine_multi`` round-robins that loop over several program slots
(e.g. texture then post-process), rendering every candidate compositely
with the other slots' current best programs held fixed; with one domain
it degenerates to ``refine`` exactly, trace included.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .dsl.render import RenderParams
from .errors import BackendError, ExecutionFailed, InitError
from .evaluate import tournament
from .imagine import imagine
from .rng import mix64
from .types import (CandidateRecord, EditCandidate, Intent, IterationRecord,
                    Program, ProgramEntry, SearchConfig, SearchTrace,
                    VisualState, validate_config)

_TOURNAMENT_SALT = 0x544F55524E


@dataclass
class Budget:
    """Optional caps on backend calls; exceeded budgets truncate the run."""

    max_generator_calls: Optional[int] = None
    max_evaluator_queries: Optional[int] = None
    max_executor_runs: Optional[int] = None


class _BudgetState:
    def __init__(self, budget: Optional[Budget]):
        self.budget = budget or Budget()
        self.generator_calls = 0
        self.evaluator_queries = 0
        self.executor_runs = 0

    def allows_iteration(self, branch: int) -> bool:
        b = self.budget
        if b.max_generator_calls is not None and \
                self.generator_calls + branch > b.max_generator_calls:
            return False
        if b.max_evaluator_queries is not None and \
                self.evaluator_queries >= b.max_evaluator_queries:
            return False
        if b.max_executor_runs is not None and \
                self.executor_runs >= b.max_executor_runs:
            return False
        return True


@dataclass
class IterationImages:
    index: int
    candidates: dict            # slot -> VisualState (successful only)
    winner: VisualState


@dataclass
class RunArtifacts:
    """In-memory images gathered during a run, for the run-directory writer."""

    imagined: tuple = ()
    initial: Optional[VisualState] = None
    iterations: list = field(default_factory=list)


@dataclass
class RefineResult:
    best_program: Program
    best_state: VisualState
    trace: SearchTrace
    artifacts: RunArtifacts


def realize_candidate(source: str, build: Callable[[str], Program],
                      execute: Callable[[Program], VisualState],
                      retries: int,
                      regenerate: Callable[[int], str]) -> EditCandidate:
    """Execute a proposal, regenerating on failure; R+1 total attempts.

    ``build`` wraps source text in a Program; ``regenerate(k)`` supplies a
    fresh proposal for the slot's k-th extra attempt.  Returns a candidate
    with a state on success, or a dropped candidate carrying the last
    classified error after R+1 failures.
    """
    if retries < 0:
        raise ValueError("retries must be >= 0")
    attempts = 0
    current = source
    program = build(current)
    last_error = None
    while attempts < retries + 1:
        attempts += 1
        try:
            state = execute(program)
            return EditCandidate(program=program, state=state, attempts=attempts)
        except ExecutionFailed as exc:
            last_error = exc.error
            if attempts < retries + 1:
                current = regenerate(attempts)
                program = build(current)
    return EditCandidate(program=program, error=last_error, attempts=attempts)


def _cache_runs(executor) -> Optional[int]:
    cache = getattr(executor, "cache", None)
    return cache.runs if cache is not None else None


class _SlotRefiner:
    """One full refinement of the program at ``slot`` inside ``programs``."""

    def __init__(self, programs: list[Program], slot: int, cfg: SearchConfig,
                 intent: Intent, executor, generator, evaluator,
                 params: RenderParams, budget_state: _BudgetState):
        self.programs = programs
        self.slot = slot
        self.cfg = cfg
        self.intent = intent
        self.executor = executor
        self.generator = generator
        self.evaluator = evaluator
        self.params = params
        self.budget = budget_state
        self.score_fn = getattr(evaluator, "score", None)
        self.registry: dict[str, ProgramEntry] = {}
        self.lock = threading.Lock()

    def _register(self, program: Program):
        self.registry[program.id] = ProgramEntry(
            source=program.source, domain_tag=program.domain_tag,
            parent_id=program.parent_id, edit_kind=program.edit_kind)

    def _execute(self, program: Program) -> VisualState:
        stack = list(self.programs)
        stack[self.slot] = program
        return self.executor.execute(stack, self.params)

    def _score(self, state: VisualState) -> Optional[float]:
        return self.score_fn(state) if self.score_fn is not None else None

    def run(self) -> RefineResult:
        cfg = self.cfg
        p0 = self.programs[self.slot]
        self._register(p0)
        try:
            s0 = self._execute(p0)
        except ExecutionFailed as exc:
            raise InitError(
                f"initial program failed to execute: {exc.error.kind}: "
                f"{exc.error.message}") from exc

        incumbent_prog, incumbent_state = p0, s0
        initial_score = self._score(s0)
        artifacts = RunArtifacts(initial=s0)
        records: list[IterationRecord] = []
        truncated = False

        for t in range(1, cfg.depth + 1):
            if not self.budget.allows_iteration(cfg.branch):
                truncated = True
                break
            mode = cfg.schedule[t - 1]
            record, incumbent_prog, incumbent_state, images = self._iterate(
                t, mode, incumbent_prog, incumbent_state)
            records.append(record)
            artifacts.iterations.append(images)

        trace = SearchTrace(
            seed=cfg.seed, depth=cfg.depth, branch=cfg.branch,
            schedule=cfg.schedule, initial_id=p0.id, final_id=incumbent_prog.id,
            iterations=tuple(records), programs=self.registry,
            truncated=truncated, initial_score=initial_score,
            final_score=self._score(incumbent_state))
        return RefineResult(best_program=incumbent_prog,
                            best_state=incumbent_state, trace=trace,
                            artifacts=artifacts)

    # -- one iteration

    def _iterate(self, t: int, mode: str, incumbent_prog: Program,
                 incumbent_state: VisualState):
        cfg = self.cfg
        counters = {"retry": 0}
        runs_before = _cache_runs(self.executor)
        exec_calls = [0]

        def execute_counted(program: Program) -> VisualState:
            with self.lock:
                exec_calls[0] += 1
            return self._execute(program)

        def propose_slot(slot: int, attempt_counter: list[int]) -> str:
            """One generator call with backend-failure retries, then padding."""
            backend_failures = 0
            while True:
                attempt = attempt_counter[0]
                attempt_counter[0] += 1
                is_retry = attempt > 0
                try:
                    text = self.generator.propose_one(
                        incumbent_prog, incumbent_state, self.intent, mode,
                        slot, attempt)
                except BackendError:
                    backend_failures += 1
                    with self.lock:
                        if is_retry:
                            counters["retry"] += 1
                        self.budget.generator_calls += 1
                    if backend_failures > cfg.retries:
                        return incumbent_prog.source
                    continue
                with self.lock:
                    if is_retry:
                        counters["retry"] += 1
                    self.budget.generator_calls += 1
                return text

        def realize_slot(slot: int) -> EditCandidate:
            attempt_counter = [0]
            first = propose_slot(slot, attempt_counter)

            def build(source: str) -> Program:
                return Program.create(source, incumbent_prog.domain_tag,
                                      parent=incumbent_prog, edit_kind=mode)

            def regenerate(_k: int) -> str:
                return propose_slot(slot, attempt_counter)

            return realize_candidate(first, build, execute_counted,
                                     cfg.retries, regenerate)

        if cfg.max_parallel > 1:
            with ThreadPoolExecutor(max_workers=cfg.max_parallel) as pool:
                candidates = list(pool.map(realize_slot, range(cfg.branch)))
        else:
            candidates = [realize_slot(slot) for slot in range(cfg.branch)]

        for cand in candidates:
            self._register(cand.program)

        pool_entries = [(c.program, c.state) for c in candidates if c.ok]
        has_incumbent = cfg.flags.revert_enabled
        if has_incumbent:
            pool_entries.append((incumbent_prog, incumbent_state))

        failed = not pool_entries
        if failed:
            winner_prog, winner_state = incumbent_prog, incumbent_state
            comparisons = 0
        else:
            t_seed = mix64(cfg.seed, _TOURNAMENT_SALT, t)
            index, comparisons = tournament(
                self.evaluator, pool_entries, self.intent, t_seed,
                incumbent_last=has_incumbent)
            winner_prog, winner_state = pool_entries[index]
        self.budget.evaluator_queries += comparisons

        reverted = winner_prog.id == incumbent_prog.id
        runs_after = _cache_runs(self.executor)
        executor_runs = (runs_after - runs_before
                         if runs_before is not None else exec_calls[0])
        self.budget.executor_runs += executor_runs

        cand_records = tuple(
            CandidateRecord(
                slot=i, program_id=c.program.id, attempts=c.attempts, ok=c.ok,
                error=c.error, score=self._score(c.state) if c.ok else None)
            for i, c in enumerate(candidates))
        record = IterationRecord(
            index=t, mode=mode, candidates=cand_records,
            winner_id=winner_prog.id, reverted=reverted, failed=failed,
            evaluator_queries=comparisons, generator_calls=cfg.branch,
            retry_calls=counters["retry"], executor_runs=executor_runs,
            winner_score=self._score(winner_state),
            incumbent_score=self._score(incumbent_state))
        images = IterationImages(
            index=t,
            candidates={i: c.state for i, c in enumerate(candidates) if c.ok},
            winner=winner_state)
        return record, winner_prog, winner_state, images


def refine(cfg: SearchConfig, p0: Program, intent: Intent, executor,
           generator, evaluator, imaginer=None,
           params: Optional[RenderParams] = None,
           budget: Optional[Budget] = None) -> RefineResult:
    """Iteratively refine ``p0`` toward ``intent``; see module docstring."""
    validate_config(cfg)
    params = params or RenderParams(seed=cfg.seed)
    intent = imagine(imaginer, intent,
                     enabled=cfg.flags.imagination_enabled)
    refiner = _SlotRefiner([p0], 0, cfg, intent, executor, generator,
                           evaluator, params, _BudgetState(budget))
    result = refiner.run()
    if intent.imagined_images:
        result.artifacts.imagined = intent.imagined_images
    return result


@dataclass
class DomainSpec:
    """One refinement domain for multi-program runs."""

    cfg: SearchConfig
    p0: Program
    generator: object
    evaluator: object


@dataclass
class MultiEntry:
    round: int                  # 1-based
    domain: int                 # index into the domain list
    trace: SearchTrace


@dataclass
class MultiTrace:
    rounds: int
    entries: tuple[MultiEntry, ...]

    @property
    def generator_calls(self) -> int:
        return sum(e.trace.generator_calls for e in self.entries)

    @property
    def evaluator_queries(self) -> int:
        return sum(e.trace.evaluator_queries for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "kind": "multi",
            "rounds": self.rounds,
            "totals": {
                "generator_calls": self.generator_calls,
                "evaluator_queries": self.evaluator_queries,
            },
            "entries": [{"round": e.round, "domain": e.domain,
                         "trace": e.trace.to_dict()} for e in self.entries],
        }


@dataclass
class MultiResult:
    best_programs: list[Program]
    best_state: VisualState
    trace: MultiTrace
    artifacts: list          # (round, domain, RunArtifacts) triples
    imagined: tuple = ()


def refine_multi(domains: Sequence[DomainSpec], intent: Intent, executor,
                 imaginer=None, rounds: int = 1,
                 params: Optional[RenderParams] = None,
                 budget: Optional[Budget] = None) -> MultiResult:
    """Round-robin refinement over multiple program slots.

    Candidate renders are composite: domain i's candidate is substituted
    at position i while every other slot keeps its current best program,
    and the evaluator judges the composite image.
    """
    if not domains:
        raise ValueError("at least one domain is required")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    for dom in domains:
        validate_config(dom.cfg)
    params = params or RenderParams(seed=domains[0].cfg.seed)
    intent = imagine(imaginer, intent,
                     enabled=domains[0].cfg.flags.imagination_enabled)

    programs = [dom.p0 for dom in domains]
    try:
        state = executor.execute(programs, params)
    except ExecutionFailed as exc:
        raise InitError(f"initial program stack failed to execute: "
                        f"{exc.error.kind}: {exc.error.message}") from exc

    budget_state = _BudgetState(budget)
    entries: list[MultiEntry] = []
    artifact_log = []
    for rnd in range(1, rounds + 1):
        for i, dom in enumerate(domains):
            refiner = _SlotRefiner(programs, i, dom.cfg, intent, executor,
                                   dom.generator, dom.evaluator, params,
                                   budget_state)
            result = refiner.run()
            programs[i] = result.best_program
            state = result.best_state
            entries.append(MultiEntry(round=rnd, domain=i, trace=result.trace))
            artifact_log.append((rnd, i, result.artifacts))

    trace = MultiTrace(rounds=rounds, entries=tuple(entries))
    return MultiResult(best_programs=programs, best_state=state, trace=trace,
                       artifacts=artifact_log, imagined=intent.imagined_images)
