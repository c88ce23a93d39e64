"""
evaluation.py

Scoring harness: strict accuracy of a theory on a masked task, the constant
and inertia baselines, input size in bits, and suite runs with a results table.
"""

# --- Standard Library Imports ---
import csv
import io
import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

# --- Third-party Library Imports ---
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

# --- Local Imports ---
from .config import MAX_WORKERS
from .errors import InvalidInputError
from .logic import Atom, ConstraintInstance, Exclusions, Theory, constraint_instances
from .problem import SearchBudget, SolveOptions
from .solver import solve
from .tasks import IMPUTE, PREDICT, RETRODICT, MaskedTask
from .trace import detect_period

logger = logging.getLogger(__name__)

CONSTANT = 'constant'
INERTIA = 'inertia'

RESULT_COLUMNS = ('task', 'mode', 'solved', 'accurate', 'cost', 'seconds')

AtomVerdict = Tuple[int, Atom, bool]


# --- Pydantic Data Models ---

class EvalResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    task: str = Field(description="Task name.")
    mode: str = Field(description="predict, retrodict or impute.")
    solved: bool = Field(False, description="A theory (or baseline prediction) was produced.")
    accurate: bool = Field(False, description="Every hidden atom was predicted exactly.")
    hits: int = Field(0, ge=0)
    misses: int = Field(0, ge=0)
    cost: Optional[int] = Field(None, description="Cost of the theory, if any.")
    seconds: float = Field(0.0, ge=0)
    input_bits: float = Field(0.0, ge=0)
    error: Optional[str] = Field(None, description="Why the task failed, if it did.")
    log: List[str] = Field(default_factory=list, description="Rendered search log lines.")

    @model_validator(mode='after')
    def _accurate_needs_solved(self) -> 'EvalResult':
        if self.accurate and not self.solved:
            raise ValueError("a result cannot be accurate without being solved")
        return self


class SuiteSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    tasks: int = 0
    solved: int = 0
    accurate: int = 0
    percent_accurate: float = 0.0
    mean_bits: float = 0.0
    mean_seconds: float = 0.0

    def render(self) -> str:
        return (f"tasks={self.tasks} solved={self.solved} accurate={self.accurate} "
                f"({self.percent_accurate:.1f}%) input bits={self.mean_bits:.1f} time={self.mean_seconds:.2f}s")


# --- Helpers ---

def _instance_lookup(masked: MaskedTask) -> Dict[Atom, ConstraintInstance]:
    task = masked.task
    lookup: Dict[Atom, ConstraintInstance] = {}
    for inst in constraint_instances(task.base_sig, task.given_constraints):
        for item in inst.atoms:
            lookup.setdefault(item, inst)
    return lookup


def _score(masked: MaskedTask, predicted: Dict[int, FrozenSet[Atom]],
           exclusions: Optional[Exclusions] = None) -> Tuple[bool, List[AtomVerdict]]:
    detail: List[AtomVerdict] = []
    for t, item in sorted(masked.hidden):
        state = predicted.get(t, frozenset())
        hit = item in state and not (exclusions is not None and exclusions.clashes(item, state))
        detail.append((t, item, hit))
    return all(hit for _, _, hit in detail), detail


# --- Accuracy ---

def strict_accuracy(theory: Theory, masked: MaskedTask) -> Tuple[bool, List[AtomVerdict]]:
    """A hidden atom is a hit iff the trace holds it and nothing the task's constraints rule out beside it.

    The second half only matters for theories whose own constraints are
    weaker than the task's, such as those found with conceptual unity ablated.
    """
    trace = detect_period(theory)
    times = {t for t, _ in masked.hidden}
    predicted = {t: trace.state(t) for t in times}
    exclusions = Exclusions(masked.task.base_sig, masked.task.given_constraints)
    return _score(masked, predicted, exclusions)


def baseline_constant(masked: MaskedTask) -> Tuple[FrozenSet[Tuple[int, Atom]], bool, List[AtomVerdict]]:
    """Each subject's most frequent visible value, ties to the canonically first."""
    lookup = _instance_lookup(masked)
    counts: Dict[ConstraintInstance, Dict[Atom, int]] = {}
    for state in masked.task.seq.states:
        for item in state:
            inst = lookup.get(item)
            if inst is not None:
                tally = counts.setdefault(inst, {})
                tally[item] = tally.get(item, 0) + 1
    predictions = set()
    for t, item in masked.hidden:
        inst = lookup.get(item)
        if inst is None:
            continue
        tally = counts.get(inst, {})
        choice = min(inst.atoms, key=lambda a: (-tally.get(a, 0), a))
        predictions.add((t, choice))
    return _baseline_result(masked, predictions)


def _neighbour_order(t: int, horizon: int, mode: str) -> List[int]:
    if mode == PREDICT:
        return list(range(t - 1, 0, -1))
    if mode == RETRODICT:
        return list(range(t + 1, horizon + 1))
    order = []
    for d in range(1, horizon):
        order += [s for s in (t - d, t + d) if 1 <= s <= horizon]
    return order


def baseline_inertia(masked: MaskedTask) -> Tuple[FrozenSet[Tuple[int, Atom]], bool, List[AtomVerdict]]:
    """The nearest visible value of the same subject: earlier for predict, later for retrodict, either for impute."""
    lookup = _instance_lookup(masked)
    states = masked.task.seq.states
    predictions = set()
    for t, item in sorted(masked.hidden):
        inst = lookup.get(item)
        if inst is None:
            continue
        for s in _neighbour_order(t, len(states), masked.mode):
            seen = [a for a in inst.atoms if a in states[s - 1]]
            if seen:
                predictions.add((t, seen[0]))
                break
        else:
            raise InvalidInputError(f"{masked.name}: no visible neighbour for {item} at t={t}")
    return _baseline_result(masked, predictions)


def _baseline_result(masked: MaskedTask, predictions) -> Tuple[FrozenSet[Tuple[int, Atom]], bool, List[AtomVerdict]]:
    by_time: Dict[int, set] = {}
    for t, item in predictions:
        by_time.setdefault(t, set()).add(item)
    accurate, detail = _score(masked, {t: frozenset(s) for t, s in by_time.items()})
    return frozenset(predictions), accurate, detail


# --- Input Size ---

def input_bits(masked: MaskedTask) -> float:
    """Sum over visible atoms of log2 of the alternatives its constraint instance offers (1 bit when unconstrained)."""
    lookup = _instance_lookup(masked)
    widths = [len(lookup[a].atoms) if a in lookup else 2 for state in masked.task.seq.states for a in state]
    if not widths:
        return 0.0
    return float(np.log2(np.array(widths, dtype=float)).sum())


# --- Suites ---

def evaluate_task(masked: MaskedTask, budget: Optional[SearchBudget] = None,
                  opts: Optional[SolveOptions] = None) -> EvalResult:
    """Solves one masked task and scores it; failures become an `error` on the result."""
    started = time.monotonic()
    bits = round(input_bits(masked), 1)
    try:
        result = solve(masked.task, budget, opts, workers=1)
        if result.theory is None:
            return EvalResult(task=masked.name, mode=masked.mode, seconds=time.monotonic() - started,
                              input_bits=bits, log=[e.render() for e in result.log])
        accurate, detail = strict_accuracy(result.theory, masked)
        hits = sum(1 for _, _, hit in detail if hit)
        return EvalResult(task=masked.name, mode=masked.mode, solved=True, accurate=accurate, hits=hits,
                          misses=len(detail) - hits, cost=result.cost, seconds=time.monotonic() - started,
                          input_bits=bits, log=[e.render() for e in result.log])
    except Exception as e:
        logger.exception(f"[ERROR] Task {masked.name} failed: {e}")
        return EvalResult(task=masked.name, mode=masked.mode, seconds=time.monotonic() - started,
                          input_bits=bits, error=str(e))


def evaluate_baseline(masked: MaskedTask, kind: str) -> EvalResult:
    started = time.monotonic()
    runner = {CONSTANT: baseline_constant, INERTIA: baseline_inertia}.get(kind)
    if runner is None:
        raise InvalidInputError(f"unknown baseline {kind!r}")
    bits = round(input_bits(masked), 1)
    try:
        _, accurate, detail = runner(masked)
    except InvalidInputError as e:
        return EvalResult(task=masked.name, mode=masked.mode, seconds=time.monotonic() - started,
                          input_bits=bits, error=str(e))
    hits = sum(1 for _, _, hit in detail if hit)
    return EvalResult(task=masked.name, mode=masked.mode, solved=True, accurate=accurate, hits=hits,
                      misses=len(detail) - hits, seconds=time.monotonic() - started, input_bits=bits)


def summarize(results: Sequence[EvalResult]) -> SuiteSummary:
    if not results:
        return SuiteSummary()
    accurate = sum(1 for r in results if r.accurate)
    return SuiteSummary(
        tasks=len(results),
        solved=sum(1 for r in results if r.solved),
        accurate=accurate,
        percent_accurate=100.0 * accurate / len(results),
        mean_bits=float(np.mean([r.input_bits for r in results])),
        mean_seconds=float(np.mean([r.seconds for r in results])),
    )


def run_suite(tasks: Sequence[MaskedTask], budget: Optional[SearchBudget] = None,
              opts: Optional[SolveOptions] = None, workers: int = MAX_WORKERS,
              baseline: Optional[str] = None) -> Tuple[List[EvalResult], SuiteSummary]:
    """Scores every task (with the solver, or a baseline when one is named); results keep task order."""
    if not tasks:
        return [], SuiteSummary()
    print_every = max(1, len(tasks) // 10)
    results: List[Optional[EvalResult]] = [None] * len(tasks)

    def run_one(masked: MaskedTask) -> EvalResult:
        if baseline is not None:
            return evaluate_baseline(masked, baseline)
        return evaluate_task(masked, budget, opts)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        future_to_index = {executor.submit(run_one, masked): i for i, masked in enumerate(tasks)}
        for done, future in enumerate(as_completed(future_to_index), start=1):
            index = future_to_index[future]
            try:
                results[index] = future.result()
            except Exception as e:
                logger.exception(f"[ERROR] Task {tasks[index].name} failed: {e}")
                results[index] = EvalResult(task=tasks[index].name, mode=tasks[index].mode, error=str(e))
            if done % print_every == 0 or done == len(tasks):
                logger.info(f"Progress: {done}/{len(tasks)} tasks scored")
    finished = [r for r in results if r is not None]
    summary = summarize(finished)
    logger.info(f"Suite finished: {summary.render()}")
    return finished, summary


def results_table(results: Sequence[EvalResult]) -> str:
    """Comma-separated table: task,mode,solved,accurate,cost,seconds."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(RESULT_COLUMNS)
    for r in results:
        writer.writerow([r.task, r.mode, 'yes' if r.solved else 'no', 'yes' if r.accurate else 'no',
                         '' if r.cost is None else r.cost, f"{r.seconds:.2f}"])
    return buffer.getvalue()
