"""
unity.py

The four unity conditions over the finite part of a trace (prefix plus one
full period), which decides them for the whole infinite trace.
"""

# --- Standard Library Imports ---
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

# --- Third-party Library Imports ---
from networkx.utils import UnionFind
from pydantic import BaseModel, ConfigDict, Field

# --- Local Imports ---
from .logic import (
    EXISTS_UNIQUE, XOR_BINARY, XOR_UNARY, Atom, ConstraintInstance, Theory,
    constraint_instances, violated_instance,
)
from .trace import Evaluator, Trace, detect_period, fired_heads, index_atoms


# --- Pydantic Data Models ---

class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    passed: bool = Field(description="Whether the condition holds.")
    detail: Optional[str] = Field(None, description="First counterexample when it does not.")

    def __bool__(self) -> bool:
        return self.passed


PASS = CheckResult(passed=True)


class UnityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    spatial: CheckResult
    conceptual: CheckResult
    static: CheckResult
    temporal: CheckResult

    @property
    def unified(self) -> bool:
        return all((self.spatial.passed, self.conceptual.passed, self.static.passed, self.temporal.passed))

    def render(self) -> str:
        """Four verdict lines, one per condition."""
        lines = []
        for name in ('spatial', 'conceptual', 'static', 'temporal'):
            result: CheckResult = getattr(self, name)
            lines.append(f"{name}: pass" if result.passed else f"{name}: FAIL ({result.detail})")
        return '\n'.join(lines)


# --- Helpers ---

def disconnected_pair(objects: Sequence[str], state: Iterable[Atom]) -> Optional[Tuple[str, str]]:
    """Lexicographically first pair of objects no chain of binary atoms links, if any."""
    if len(objects) < 2:
        return None
    components = UnionFind(objects)
    for item in state:
        if len(item.args) == 2:
            components.union(*item.args)
    ordered = sorted(objects)
    for i, x in enumerate(ordered):
        for y in ordered[i + 1:]:
            if components[x] != components[y]:
                return x, y
    return None


def static_violation(state: FrozenSet[Atom], instances: Sequence[ConstraintInstance],
                     evaluator: Evaluator) -> Optional[str]:
    inst = violated_instance(state, instances)
    if inst is not None:
        held = [str(a) for a in inst.atoms if a in state]
        return f"{inst} holds {len(held)} times" + (f" ({', '.join(held)})" if held else "")
    closed = set(state)
    missing = evaluator.close(closed)
    if missing:
        return f"not closed under static rules, missing {min(missing)}"
    return None


# --- Operations ---

def check_spatial(theory: Theory, trace: Trace) -> CheckResult:
    objects = [name for name, _ in theory.signature.objects]
    for t in range(1, trace.end + 1):
        pair = disconnected_pair(objects, trace.state(t))
        if pair:
            return CheckResult(passed=False, detail=f"t={t}: {pair[0]} not connected to {pair[1]}")
    return PASS


def check_conceptual(theory: Theory) -> CheckResult:
    unary: set = set()
    binary: set = set()
    for c in theory.constraints:
        if c.kind == XOR_UNARY:
            unary.update(c.predicates)
        elif c.kind in (XOR_BINARY, EXISTS_UNIQUE):
            binary.update(c.predicates)
    for name, arg_types in theory.signature.predicates:
        covered = unary if len(arg_types) == 1 else binary
        if name not in covered:
            return CheckResult(passed=False, detail=f"predicate {name} is in no constraint")
    return PASS


def check_static(theory: Theory, trace: Trace) -> CheckResult:
    instances = constraint_instances(theory.signature, theory.constraints)
    evaluator = Evaluator.for_theory(theory)
    for t in range(1, trace.end + 1):
        if trace.conflicted(t):
            return CheckResult(passed=False, detail=f"t={t}: frame conflict")
        problem = static_violation(trace.state(t), instances, evaluator)
        if problem:
            return CheckResult(passed=False, detail=f"t={t}: {problem}")
    return PASS


def check_temporal(theory: Theory, trace: Trace) -> CheckResult:
    causal = theory.causal_rules
    for t in range(1, trace.end + 1):
        table = index_atoms(trace.state(t))
        following = trace.state(t + 1)
        for rule in causal:
            missing = sorted(fired_heads(rule, table) - following)
            if missing:
                return CheckResult(passed=False, detail=f"t={t}: '{rule}' requires {missing[0]} at t={t + 1}")
    return PASS


def check_unity(theory: Theory, trace: Optional[Trace] = None) -> UnityReport:
    """All four conditions; computes the trace when none is given."""
    trace = trace if trace is not None else detect_period(theory)
    return UnityReport(
        spatial=check_spatial(theory, trace),
        conceptual=check_conceptual(theory),
        static=check_static(theory, trace),
        temporal=check_temporal(theory, trace),
    )
