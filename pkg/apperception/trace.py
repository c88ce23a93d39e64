"""
trace.py

Deterministic evaluation of a theory into its trace.

Each step runs three phases: seed (initial conditions at t=1, otherwise the
heads of causal rules fired by the previous state), closure under the static
rules, then frame admission of previous atoms that the closed seed does not
rule out. The state is re-closed after admission; carried atoms that clash
with a newly derived atom are withdrawn and the closure recomputed until
nothing more is withdrawn. A withdrawn atom that clashes with nothing in the
final state flags a frame conflict.
"""

# --- Standard Library Imports ---
import logging
from collections import defaultdict
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

# --- Third-party Library Imports ---
from pydantic import BaseModel, ConfigDict, Field

# --- Local Imports ---
from .config import MAX_TRACE_STATES
from .errors import ResourceLimitError
from .logic import STATIC, Atom, Exclusions, Rule, SensorySequence, Theory, TypeSignature

logger = logging.getLogger(__name__)

State = FrozenSet[Atom]


# --- Pydantic Data Models ---

class Trace(BaseModel):
    """Prefix of distinct states plus where the period starts and how long it is."""
    model_config = ConfigDict(frozen=True)

    prefix: Tuple[FrozenSet[Atom], ...] = Field(description="A_1 .. A_end, all distinct.")
    period_start: int = Field(ge=1, description="1-based index where the period begins.")
    period_length: int = Field(ge=1, description="Number of states in the period.")
    conflicts: FrozenSet[int] = Field(default=frozenset(), description="Indices flagged with frame conflicts.")

    @property
    def end(self) -> int:
        """Index of the last stored state (one full period after the prefix)."""
        return self.period_start + self.period_length - 1

    def index(self, t: int) -> int:
        """Maps any time index onto the stored prefix."""
        if t < 1:
            raise IndexError(f"time index {t} < 1")
        if t <= self.end:
            return t
        return self.period_start + (t - self.period_start) % self.period_length

    def state(self, t: int) -> FrozenSet[Atom]:
        return self.prefix[self.index(t) - 1]

    def states(self, horizon: int) -> List[FrozenSet[Atom]]:
        return [self.state(t) for t in range(1, horizon + 1)]

    def conflicted(self, t: int) -> bool:
        return self.index(t) in self.conflicts


# --- Rule Matching ---

def index_atoms(atoms: Iterable[Atom]) -> Dict[str, Set[Tuple[str, ...]]]:
    table: Dict[str, Set[Tuple[str, ...]]] = defaultdict(set)
    for item in atoms:
        table[item.pred].add(item.args)
    return table


def _bindings(body: Sequence[Atom], table: Dict[str, Set[Tuple[str, ...]]]) -> Iterator[Dict[str, str]]:
    """Substitutions making every body atom true, joining atom by atom."""

    def extend(i: int, binding: Dict[str, str]) -> Iterator[Dict[str, str]]:
        if i == len(body):
            yield binding
            return
        pred, variables = body[i]
        for values in tuple(table.get(pred, ())):
            candidate = binding
            for var, value in zip(variables, values):
                bound = candidate.get(var)
                if bound is None:
                    if candidate is binding:
                        candidate = dict(binding)
                    candidate[var] = value
                elif bound != value:
                    break
            else:
                yield from extend(i + 1, candidate)

    yield from extend(0, {})


def fired_heads(rule: Rule, table: Dict[str, Set[Tuple[str, ...]]]) -> Set[Atom]:
    """Ground heads of every instance of `rule` whose body holds."""
    head_pred, head_vars = rule.head
    return {Atom(head_pred, tuple(b[v] for v in head_vars)) for b in _bindings(rule.body, table)}


# --- Evaluator ---

class Evaluator:
    """Steps states forward for one (rules, constraints) pair."""

    def __init__(self, sig: TypeSignature, rules: Iterable[Rule], constraints=(), exclusions: Optional[Exclusions] = None):
        rules = tuple(rules)
        self.signature = sig
        self.static_rules = tuple(r for r in rules if r.kind == STATIC)
        self.causal_rules = tuple(r for r in rules if r.kind != STATIC)
        self.exclusions = exclusions if exclusions is not None else Exclusions(sig, constraints)

    @classmethod
    def for_theory(cls, theory: Theory) -> 'Evaluator':
        return cls(theory.signature, theory.rules, theory.constraints)

    def close(self, atoms: Set[Atom]) -> Set[Atom]:
        """Closes `atoms` in place under the static rules; returns the atoms it added."""
        added: Set[Atom] = set()
        if not self.static_rules:
            return added
        table = index_atoms(atoms)
        changed = True
        while changed:
            changed = False
            for rule in self.static_rules:
                for head in fired_heads(rule, table):
                    if head not in atoms:
                        atoms.add(head)
                        added.add(head)
                        table[head.pred].add(head.args)
                        changed = True
        return added

    def fire(self, prev: State) -> Set[Atom]:
        """Heads of causal rules whose bodies hold in `prev`."""
        heads: Set[Atom] = set()
        if not self.causal_rules:
            return heads
        table = index_atoms(prev)
        for rule in self.causal_rules:
            heads |= fired_heads(rule, table)
        return heads

    def initial(self, inits: Iterable[Atom]) -> Tuple[State, bool]:
        state = set(inits)
        self.close(state)
        return frozenset(state), False

    def advance(self, prev: State) -> Tuple[State, bool]:
        """A_{t+1} from A_t, and whether a frame conflict was flagged."""
        seed = self.fire(prev)
        self.close(seed)
        blocked = {item for item in prev - seed if self.exclusions.clashes(item, seed)}
        while True:
            carried = prev - seed - blocked
            state = seed | carried
            self.close(state)
            fresh = state - prev
            withdrawn = {item for item in carried if self.exclusions.clashes(item, fresh)}
            if not withdrawn:
                break
            blocked |= withdrawn
        # a withdrawn atom whose rival vanished with it has no consistent place
        conflict = any(not self.exclusions.clashes(item, state) for item in blocked)
        return frozenset(state), conflict

    def run(self, first: State, horizon: int) -> Tuple[List[State], List[bool]]:
        states, flags = [first], [False]
        while len(states) < horizon:
            nxt, flag = self.advance(states[-1])
            states.append(nxt)
            flags.append(flag)
        return states[:horizon], flags[:horizon]

    def cycle(self, first: State, max_states: int = MAX_TRACE_STATES, first_conflict: bool = False) -> Trace:
        """Steps from `first` until a state repeats."""
        seen: Dict[State, int] = {first: 1}
        prefix: List[State] = [first]
        conflicts: Set[int] = {1} if first_conflict else set()
        while True:
            nxt, flag = self.advance(prefix[-1])
            if nxt in seen:
                start = seen[nxt]
                if flag:
                    conflicts.add(start)
                return Trace(prefix=tuple(prefix), period_start=start,
                             period_length=len(prefix) - start + 1, conflicts=frozenset(conflicts))
            if len(prefix) >= max_states:
                raise ResourceLimitError(f"trace did not repeat within {max_states} states")
            prefix.append(nxt)
            seen[nxt] = len(prefix)
            if flag:
                conflicts.add(len(prefix))


# --- Operations ---

def step(theory: Theory, prev: Optional[Iterable[Atom]], t: int) -> FrozenSet[Atom]:
    """A_t from A_{t-1}; `prev` is None exactly when t = 1."""
    if (prev is None) != (t == 1):
        raise ValueError("prev must be None exactly when t == 1")
    evaluator = Evaluator.for_theory(theory)
    if prev is None:
        return evaluator.initial(theory.inits)[0]
    return evaluator.advance(frozenset(prev))[0]


def evaluate_flagged(theory: Theory, horizon: int) -> Tuple[List[FrozenSet[Atom]], List[bool]]:
    """States A_1..A_horizon with their frame-conflict flags."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    evaluator = Evaluator.for_theory(theory)
    first, _ = evaluator.initial(theory.inits)
    return evaluator.run(first, horizon)


def evaluate(theory: Theory, horizon: int) -> List[FrozenSet[Atom]]:
    return evaluate_flagged(theory, horizon)[0]


def detect_period(theory: Theory, max_states: int = MAX_TRACE_STATES) -> Trace:
    evaluator = Evaluator.for_theory(theory)
    first, _ = evaluator.initial(theory.inits)
    trace = evaluator.cycle(first, max_states)
    logger.debug(f"Trace repeats: start={trace.period_start} length={trace.period_length}")
    return trace


def covers(seq: SensorySequence, trace: Union[Trace, Sequence[FrozenSet[Atom]]]) -> bool:
    """True iff every sequence state is a subset of the trace state at the same index."""
    if isinstance(trace, Trace):
        return all(state <= trace.state(t) for t, state in enumerate(seq.states, start=1))
    if len(trace) < len(seq):
        return False
    return all(state <= trace[t] for t, state in enumerate(seq.states))


def holds_somewhere(theory: Theory, item: Atom, max_states: int = MAX_TRACE_STATES) -> bool:
    trace = detect_period(theory, max_states)
    return any(item in state for state in trace.prefix)
