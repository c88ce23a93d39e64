"""
solver.py

Lowest-cost unified theory search.

`solve_template` runs a branch-and-bound over one template: for each constraint
set C' that makes the template's signature conceptually unified, rule sets are
visited in order of increasing rule cost, and each rule set is paired with its
cheapest feasible first state. A candidate is feasible when its trace covers
the sequence (or, in noisy mode, when it scores well on cost plus misses), no
state breaks a constraint or a frame, and every state is spatially connected.

`solve` is the anytime outer loop over `enumerate_templates`. It keeps the
best theory seen, starting from the degenerate theory, and returns whatever it
holds when the templates or the budget run out.
"""

# --- Standard Library Imports ---
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from fractions import Fraction
from itertools import islice
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple, Union

# --- Third-party Library Imports ---
from pydantic import BaseModel, ConfigDict, Field

# --- Local Imports ---
from .config import DEFAULT_NOISE_BETA, MAX_TRACE_STATES, MAX_WORKERS
from .degenerate import build_degenerate_theory
from .errors import BudgetExhausted, InvalidInputError
from .formats import format_theory
from .logic import (
    CAUSAL, STATIC, Atom, Constraint, Exclusions, Rule, SensorySequence, Theory, TypeSignature,
    cost, violated_instance,
)
from .problem import ApperceptionTask, SearchBudget, SolveOptions, check_task
from .search import (
    InitialStates, constraint_choices, describe_choice, max_rule_cost, merge_candidates, required_head_predicates,
    rule_candidates, rule_sets,
)
from .templates import Template, enumerate_templates
from .trace import Evaluator, detect_period
from .unity import disconnected_pair

logger = logging.getLogger(__name__)

Objective = Union[int, Fraction]


# --- Pydantic Data Models ---

class SearchLogEntry(BaseModel):
    """Outcome of one template visit."""
    model_config = ConfigDict(frozen=True)

    index: int = Field(description="1-based position in the template stream.")
    template: str = Field(description="Template summary.")
    outcome: str = Field(description="'solved', 'infeasible' or 'budget'.")
    cost: Optional[Fraction] = Field(None, description="Objective of the template's best theory, if any.")
    nodes: int = Field(0, ge=0)
    seconds: float = Field(0.0, ge=0)

    def render(self) -> str:
        outcome = self.outcome
        if self.outcome == 'solved':
            outcome = f"solved cost={_show(self.cost)}"
        elif self.cost is not None:
            outcome = f"budget best={_show(self.cost)}"
        return f"template {self.index} [{self.template}]: {outcome} nodes={self.nodes} time={self.seconds:.2f}s"


class SolveResult(BaseModel):
    theory: Optional[Theory] = Field(None, description="Best theory found, if any.")
    cost: Optional[int] = Field(None, description="cost(theory).")
    objective: Optional[Fraction] = Field(None, description="Value minimised: cost, or cost_noise in noisy mode.")
    log: List[SearchLogEntry] = Field(default_factory=list)
    exhausted: bool = Field(False, description="Whether the wall-clock budget ran out.")
    degenerate: bool = Field(False, description="Whether no template beat the memorising fallback theory.")

    @property
    def solved(self) -> bool:
        return self.theory is not None


class GeneralizedTheory(BaseModel):
    """Shared signature, rules and constraints with one set of initial conditions per sequence."""
    model_config = ConfigDict(frozen=True)

    signature: TypeSignature
    rules: Tuple[Rule, ...]
    constraints: Tuple[Constraint, ...]
    inits: Tuple[FrozenSet[Atom], ...]

    def theories(self) -> List[Theory]:
        return [Theory(signature=self.signature, inits=i, rules=self.rules, constraints=self.constraints)
                for i in self.inits]

    def texts(self, names: Optional[Sequence[str]] = None) -> List[str]:
        """One theory file per sequence; only the INIT sections differ."""
        names = names or [f"seq{i}" for i in range(1, len(self.inits) + 1)]
        if len(names) != len(self.inits):
            raise InvalidInputError(f"{len(names)} names for {len(self.inits)} sequences")
        return [format_theory(theory, comment=f"{name}: shared rules, cost {self.cost}")
                for name, theory in zip(names, self.theories())]

    @property
    def cost(self) -> int:
        return sum(len(i) for i in self.inits) + sum(r.cost for r in self.rules)


class _Candidate(NamedTuple):
    objective: Objective
    key: str
    signature: TypeSignature
    rules: Tuple[Rule, ...]
    constraints: Tuple[Constraint, ...]
    inits: Tuple[FrozenSet[Atom], ...]

    def theory(self, i: int = 0) -> Theory:
        return Theory(signature=self.signature, inits=self.inits[i], rules=self.rules, constraints=self.constraints)


def _show(value: Optional[Objective]) -> str:
    if value is None:
        return '-'
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{float(value):.3f}"


def _better(a: _Candidate, b: Optional[_Candidate]) -> bool:
    return b is None or (a.objective, a.key) < (b.objective, b.key)


# --- Per-Template Search ---

class _TemplateSearch:
    """Branch-and-bound over one template for one or more sequences sharing R and C'."""

    def __init__(self, base_sig: TypeSignature, given: Sequence[Constraint], seqs: Sequence[SensorySequence],
                 tpl: Template, opts: SolveOptions, node_limit: int, deadline: Optional[float],
                 upper_bound: Optional[Objective], symmetry: bool):
        self.base_sig = base_sig
        self.given = tuple(given)
        self.seqs = tuple(seqs)
        self.tpl = tpl
        self.sig = tpl.signature
        self.opts = opts
        self.node_limit = node_limit
        self.deadline = deadline
        self.bound = upper_bound
        self.symmetry = symmetry
        self.covering = not (opts.skip_cover or opts.noisy)
        self.objects = tuple(name for name, _ in self.sig.objects)
        self.nodes = 0
        self.best: Optional[_Candidate] = None

    # -- bookkeeping --

    def _tick(self) -> None:
        self.nodes += 1
        over_nodes = self.nodes > self.node_limit
        over_time = self.deadline is not None and time.monotonic() > self.deadline
        if over_nodes or over_time:
            reason = 'node limit' if over_nodes else 'time limit'
            raise BudgetExhausted(f"{reason} reached after {self.nodes} nodes",
                                  best=self.best, nodes=self.nodes)

    def _within(self, value: Objective) -> bool:
        return self.bound is None or value <= self.bound

    def _offer(self, candidate: _Candidate) -> None:
        if _better(candidate, self.best):
            self.best = candidate
            self.bound = candidate.objective
            logger.debug(f"New best in template: objective={_show(candidate.objective)}")

    # -- feasibility --

    def _state_ok(self, state: FrozenSet[Atom], instances, verdicts: Dict[FrozenSet[Atom], bool]) -> bool:
        verdict = verdicts.get(state)
        if verdict is None:
            verdict = violated_instance(state, instances) is None
            if verdict and not self.opts.skip_spatial:
                verdict = disconnected_pair(self.objects, state) is None
            verdicts[state] = verdict
        return verdict

    def _run(self, evaluator: Evaluator, first: FrozenSet[Atom], seq: SensorySequence,
             instances, verdicts: Dict[FrozenSet[Atom], bool]) -> Optional[int]:
        """Missed atoms of `seq` under the trace from `first`, or None when the trace is not admissible."""
        horizon = len(seq)
        misses = 0

        def observe(t: int, state: FrozenSet[Atom]) -> bool:
            nonlocal misses
            if t > horizon:
                return True
            observed = seq.states[t - 1]
            if observed <= state:
                return True
            if self.covering:
                return False
            misses += len(observed - state)
            return True

        if not observe(1, first) or not self._state_ok(first, instances, verdicts):
            return None
        prefix = [first]
        seen = {first: 1}
        while True:
            nxt, conflict = evaluator.advance(prefix[-1])
            start = seen.get(nxt)
            if start is not None:
                length = len(prefix) - start + 1
                for t in range(len(prefix) + 1, horizon + 1):
                    if not observe(t, prefix[start - 1 + (t - start) % length]):
                        return None
                return misses
            if conflict or len(prefix) >= MAX_TRACE_STATES:
                return None
            prefix.append(nxt)
            seen[nxt] = len(prefix)
            if not observe(len(prefix), nxt) or not self._state_ok(nxt, instances, verdicts):
                return None

    def _fit_sequence(self, seq: SensorySequence, rules: Tuple[Rule, ...],
                      evaluator: Evaluator, initials: InitialStates, verdicts,
                      slack: Optional[Objective]) -> Optional[Tuple[Objective, FrozenSet[Atom]]]:
        """Cheapest (objective share, I) for one sequence, with |I| + beta * misses <= slack."""
        statics = tuple(r for r in rules if r.kind == STATIC)
        required = seq.states[0] if self.covering and len(seq) else frozenset()
        beta = self.opts.noise_beta
        found: Optional[Tuple[Objective, FrozenSet[Atom]]] = None
        for inits, first in initials.minimal(statics, required):
            if slack is not None and len(inits) > slack:
                break
            if found is not None and len(inits) > found[0]:
                break
            self._tick()
            misses = self._run(evaluator, first, seq, initials.instances, verdicts)
            if misses is None:
                continue
            share = len(inits) + beta * misses if beta is not None else len(inits)
            if slack is not None and share > slack:
                continue
            if found is None or share < found[0]:
                found = (share, inits)
            if beta is None or misses == 0:
                break
        return found

    def _fit(self, level: int, rules: Tuple[Rule, ...], constraints: Tuple[Constraint, ...],
             exclusions: Exclusions, initials: InitialStates, verdicts) -> Optional[_Candidate]:
        evaluator = Evaluator(self.sig, rules, constraints, exclusions)
        total: Objective = level
        inits: List[FrozenSet[Atom]] = []
        for i, seq in enumerate(self.seqs):
            slack = None if self.bound is None else self.bound - total
            fitted = self._fit_sequence(seq, rules, evaluator, initials, verdicts, slack)
            if fitted is None:
                return None
            total += fitted[0]
            inits.append(fitted[1])
        theory = Theory(signature=self.sig, inits=inits[0], rules=rules, constraints=constraints)
        key = format_theory(theory) + ''.join(
            ','.join(str(a) for a in sorted(i)) + '\n' for i in inits[1:])
        return _Candidate(total, key, self.sig, theory.rules, theory.constraints, tuple(inits))

    # -- search --

    def run(self) -> Optional[_Candidate]:
        tpl = self.tpl
        given_exclusions = Exclusions(self.sig, self.given)
        sound_heads = self.covering and not self.opts.skip_conceptual
        needed = required_head_predicates(self.seqs, given_exclusions) if sound_heads else frozenset()
        top = max_rule_cost(tpl.n_static, tpl.n_causal, tpl.n_body)
        for constraints in constraint_choices(self.sig, self.given, self.opts.skip_conceptual):
            exclusions = Exclusions(self.sig, constraints)
            statics = rule_candidates(self.sig, exclusions, STATIC, tpl.n_body, self.symmetry) if tpl.n_static else ()
            causals = rule_candidates(self.sig, exclusions, CAUSAL, tpl.n_body, self.symmetry) if tpl.n_causal else ()
            candidates = merge_candidates(statics, causals)
            if not needed <= {r.head.pred for r in candidates}:
                continue
            logger.debug(f"C' = {describe_choice(constraints, self.given)}: {len(candidates)} candidate rules")
            initials = InitialStates(self.sig, constraints)
            verdicts: Dict[FrozenSet[Atom], bool] = {}
            for level in range(2 * len(needed), top + 1):
                if self.bound is not None and level > self.bound:
                    break
                for rules in rule_sets(candidates, level, tpl.n_static, tpl.n_causal, needed):
                    self._tick()
                    found = self._fit(level, rules, constraints, exclusions, initials, verdicts)
                    if found is None or not self._within(found.objective):
                        continue
                    self._offer(found)
                    if self.opts.skip_min_cost:
                        return self.best
        return self.best


def _search(task: ApperceptionTask, tpl: Template, opts: SolveOptions, node_limit: int,
            deadline: Optional[float], upper_bound: Optional[Objective], symmetry: Optional[bool],
            seqs: Optional[Sequence[SensorySequence]] = None) -> Tuple[Optional[_Candidate], int]:
    if not tpl.signature.extends(task.base_sig):
        raise InvalidInputError("template signature does not extend the task signature")
    search = _TemplateSearch(task.base_sig, task.given_constraints, seqs or (task.seq,), tpl, opts, node_limit,
                             deadline, upper_bound, opts.symmetry_breaking if symmetry is None else symmetry)
    return search.run(), search.nodes


def solve_template(task: ApperceptionTask, tpl: Template, opts: Optional[SolveOptions] = None,
                   budget: Optional[SearchBudget] = None, upper_bound: Optional[Objective] = None,
                   symmetry: Optional[bool] = None, deadline: Optional[float] = None) -> Optional[Theory]:
    """Lowest-cost theory within `tpl`, or None when the template holds none.

    Raises BudgetExhausted (carrying the best theory so far) when the node or
    time limit is hit first.
    """
    opts = opts or SolveOptions()
    budget = budget or SearchBudget()
    if deadline is None:
        deadline = time.monotonic() + budget.seconds
    try:
        found, _ = _search(task, tpl, opts, budget.node_limit, deadline, upper_bound, symmetry)
    except BudgetExhausted as e:
        raise BudgetExhausted(str(e), best=e.best.theory() if e.best else None, nodes=e.nodes) from None
    return found.theory() if found else None


# --- Anytime Loop ---

class _BestCell:
    """Best candidate across templates; shared by worker threads."""

    def __init__(self, seed: Optional[_Candidate] = None):
        self._lock = threading.Lock()
        self.best = seed

    def bound(self) -> Optional[Objective]:
        with self._lock:
            return self.best.objective if self.best else None

    def offer(self, candidate: Optional[_Candidate]) -> bool:
        if candidate is None:
            return False
        with self._lock:
            if _better(candidate, self.best):
                self.best = candidate
                return True
            return False


def _visit(task: ApperceptionTask, tpl: Template, index: int, opts: SolveOptions, budget: SearchBudget,
           deadline: float, cell: _BestCell) -> Tuple[SearchLogEntry, Optional[_Candidate]]:
    started = time.monotonic()
    try:
        found, nodes = _search(task, tpl, opts, budget.node_limit, deadline, cell.bound(), None)
        outcome = 'solved' if found else 'infeasible'
    except BudgetExhausted as e:
        found, nodes, outcome = e.best, e.nodes, 'budget'
    entry = SearchLogEntry(index=index, template=tpl.describe(), outcome=outcome,
                           cost=Fraction(found.objective) if found else None, nodes=nodes,
                           seconds=time.monotonic() - started)
    return entry, found


def _anytime(task: ApperceptionTask, budget: SearchBudget, opts: SolveOptions, cell: _BestCell,
             workers: int) -> Tuple[List[SearchLogEntry], bool]:
    deadline = time.monotonic() + budget.seconds
    templates = enumerate(islice(enumerate_templates(task.base_sig), budget.template_limit), start=1)
    log: List[SearchLogEntry] = []
    exhausted = False

    def record(entry: SearchLogEntry, found: Optional[_Candidate]) -> None:
        log.append(entry)
        improved = cell.offer(found)
        logger.info(entry.render() + (" (new best)" if improved else ""))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        while True:
            if time.monotonic() > deadline:
                exhausted = True
                break
            batch = list(islice(templates, max(1, workers)))
            if not batch:
                break
            future_to_index = {executor.submit(_visit, task, tpl, i, opts, budget, deadline, cell): i
                               for i, tpl in batch}
            entries = []
            for future in as_completed(future_to_index):
                index = future_to_index[future]
                try:
                    entries.append(future.result())
                except Exception as e:
                    logger.exception(f"[ERROR] Template {index} failed: {e}")
            for entry, found in sorted(entries, key=lambda pair: pair[0].index):
                record(entry, found)
            if opts.skip_min_cost and any(found is not None for _, found in entries):
                break
    return log, exhausted


def _degenerate_candidate(task: ApperceptionTask) -> Optional[_Candidate]:
    """The memorising theory as a starting incumbent; it covers the sequence, so its objective is its cost."""
    try:
        degenerate = build_degenerate_theory(task)
    except InvalidInputError as e:
        logger.warning(f"Warning: no degenerate theory for {task.name}: {e}")
        return None
    return _Candidate(cost(degenerate), format_theory(degenerate), degenerate.signature, degenerate.rules,
                      degenerate.constraints, (degenerate.inits,))


def solve(task: ApperceptionTask, budget: Optional[SearchBudget] = None, opts: Optional[SolveOptions] = None,
          workers: int = MAX_WORKERS) -> SolveResult:
    """Anytime search over templates of increasing complexity.

    Keeps going after the first theory is found; returns the best one held
    when the templates or the budget run out.
    """
    check_task(task)
    budget = budget or SearchBudget()
    opts = opts or SolveOptions()
    fallback = _degenerate_candidate(task)
    cell = _BestCell(seed=fallback)
    if opts.noisy:
        cell.offer(_empty_candidate(task, opts.noise_beta))
    log, exhausted = _anytime(task, budget, opts, cell, workers)
    best = cell.best
    if best is None:
        logger.info(f"No theory found for {task.name} after {len(log)} templates")
        return SolveResult(log=log, exhausted=exhausted)
    theory = best.theory()
    memorised = best is fallback
    if memorised:
        logger.warning(f"Warning: no template beat the degenerate theory for {task.name}")
    logger.info(f"Best theory for {task.name}: cost={cost(theory)} objective={_show(best.objective)}")
    return SolveResult(theory=theory, cost=cost(theory), objective=Fraction(best.objective), log=log,
                       exhausted=exhausted, degenerate=memorised)


# --- Noise ---

def cost_noise(theory: Theory, seq: SensorySequence, beta=DEFAULT_NOISE_BETA) -> Fraction:
    """cost(theory) plus beta times the sequence atoms the trace leaves out."""
    beta = Fraction(beta)
    if beta < 0:
        raise InvalidInputError("beta must be nonnegative")
    trace = detect_period(theory)
    misses = sum(len(state - trace.state(t)) for t, state in enumerate(seq.states, start=1))
    return Fraction(cost(theory)) + beta * misses


def _empty_candidate(task: ApperceptionTask, beta: Fraction) -> _Candidate:
    empty = Theory(signature=task.base_sig, constraints=task.given_constraints)
    return _Candidate(cost_noise(empty, task.seq, beta), format_theory(empty), empty.signature, empty.rules,
                      empty.constraints, (empty.inits,))


def solve_noisy(task: ApperceptionTask, beta=DEFAULT_NOISE_BETA, budget: Optional[SearchBudget] = None,
                opts: Optional[SolveOptions] = None, workers: int = MAX_WORKERS) -> SolveResult:
    """Minimises cost_noise instead of requiring the trace to cover the sequence.

    The empty theory is the starting incumbent, so a result always exists.
    """
    opts = (opts or SolveOptions()).model_copy(update={'noise_beta': Fraction(beta)})
    return solve(task, budget, opts, workers)


# --- Generalized Tasks ---

def solve_generalized(seqs: Sequence[SensorySequence], base_sig: TypeSignature,
                      given_constraints: Sequence[Constraint], budget: Optional[SearchBudget] = None,
                      opts: Optional[SolveOptions] = None) -> Optional[GeneralizedTheory]:
    """One signature, rule set and constraint set for every sequence, with separate initial conditions."""
    if not seqs:
        raise InvalidInputError("solve_generalized needs at least one sequence")
    budget = budget or SearchBudget()
    opts = opts or SolveOptions()
    tasks = [ApperceptionTask(name=f"seq{i}", seq=s, base_sig=base_sig, given_constraints=tuple(given_constraints))
             for i, s in enumerate(seqs, start=1)]
    for task in tasks:
        check_task(task)
    deadline = time.monotonic() + budget.seconds
    best: Optional[_Candidate] = None
    exhausted = False
    for index, tpl in enumerate(islice(enumerate_templates(base_sig), budget.template_limit), start=1):
        if time.monotonic() > deadline:
            exhausted = True
            break
        bound = best.objective if best else None
        try:
            found, nodes = _search(tasks[0], tpl, opts, budget.node_limit, deadline, bound, None, seqs)
        except BudgetExhausted as e:
            found, nodes = e.best, e.nodes
        if found is not None and _better(found, best):
            best = found
            logger.info(f"template {index}: shared theory cost={_show(found.objective)} nodes={nodes}")
    if best is None:
        if exhausted:
            raise BudgetExhausted("no shared theory found within the budget")
        return None
    return GeneralizedTheory(signature=best.signature, rules=best.rules, constraints=best.constraints,
                             inits=best.inits)
