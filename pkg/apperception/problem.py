"""Apperception tasks and the knobs that control a search."""

# --- Standard Library Imports ---
from fractions import Fraction
from typing import List, Optional, Tuple

# --- Third-party Library Imports ---
from pydantic import BaseModel, ConfigDict, Field, field_validator

# --- Local Imports ---
from .config import (
    DEFAULT_BUDGET_SECS, DEFAULT_NODE_LIMIT, DEFAULT_TEMPLATE_LIMIT, EXTENDABILITY_ATOM_LIMIT,
)
from .errors import InvalidInputError
from .logic import (
    Constraint, SensorySequence, TypeSignature, constraint_instances, enumerate_atoms, is_extendable,
    is_ground_atom, validate_constraints, validate_signature,
)


# --- Pydantic Data Models ---

class ApperceptionTask(BaseModel):
    """A sensory sequence, a suitable signature and the constraints every theory must keep."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(default='task', description="Identifier used in logs and result tables.")
    seq: SensorySequence = Field(description="The sensory sequence S.")
    base_sig: TypeSignature = Field(description="The signature phi the sequence is typed by.")
    given_constraints: Tuple[Constraint, ...] = Field(default=(), description="Constraints C.")

    @field_validator('given_constraints')
    @classmethod
    def _sorted_unique(cls, value):
        return tuple(sorted(set(value)))


class SearchBudget(BaseModel):
    """Limits for one solve call."""
    model_config = ConfigDict(frozen=True)

    seconds: float = Field(default=DEFAULT_BUDGET_SECS, gt=0, description="Wall-clock limit.")
    node_limit: int = Field(default=DEFAULT_NODE_LIMIT, gt=0, description="Candidate evaluations per template.")
    template_limit: int = Field(default=DEFAULT_TEMPLATE_LIMIT, gt=0, description="Templates to visit.")


class SolveOptions(BaseModel):
    """Ablation switches and the noisy-mode weight."""
    model_config = ConfigDict(frozen=True)

    skip_cover: bool = False
    skip_conceptual: bool = False
    skip_spatial: bool = False
    skip_min_cost: bool = False
    noise_beta: Optional[Fraction] = Field(default=None, description="Set exactly in noisy mode.")
    symmetry_breaking: bool = Field(default=True, description="Canonical rule forms only.")

    @field_validator('noise_beta', mode='before')
    @classmethod
    def _rational(cls, value):
        if value is None:
            return None
        beta = Fraction(value) if not isinstance(value, float) else Fraction(str(value))
        if beta < 0:
            raise ValueError("noise_beta must be nonnegative")
        return beta

    @property
    def noisy(self) -> bool:
        return self.noise_beta is not None

    @classmethod
    def ablating(cls, names, **extra) -> 'SolveOptions':
        """Options from CLI ablation names: cover, conceptual, spatial, mincost."""
        flags = {'cover': 'skip_cover', 'conceptual': 'skip_conceptual',
                 'spatial': 'skip_spatial', 'mincost': 'skip_min_cost'}
        unknown = set(names) - set(flags)
        if unknown:
            raise InvalidInputError(f"unknown ablation(s): {', '.join(sorted(unknown))}")
        return cls(**{flags[n]: True for n in names}, **extra)


# --- Task Invariants ---

def task_violations(task: ApperceptionTask) -> List[str]:
    sig = task.base_sig
    violations = validate_signature(sig) + validate_constraints(sig, task.given_constraints)
    if violations:
        return violations
    for t, state in enumerate(task.seq.states, start=1):
        for item in sorted(state):
            if not is_ground_atom(sig, item):
                violations.append(f"t={t}: atom {item} is not well-typed")
    constrained = {p for c in task.given_constraints for p in c.predicates}
    for pred in sorted({a.pred for a in task.seq.atoms()} - constrained):
        violations.append(f"predicate {pred} appears in the sequence but in no constraint")
    if violations:
        return violations
    ground, _ = enumerate_atoms(sig)
    if len(ground) <= EXTENDABILITY_ATOM_LIMIT:
        instances = constraint_instances(sig, task.given_constraints)
        for t, state in enumerate(task.seq.states, start=1):
            if not is_extendable(instances, state):
                violations.append(f"t={t}: state cannot be extended to satisfy the constraints")
    return violations


def check_task(task: ApperceptionTask) -> None:
    violations = task_violations(task)
    if violations:
        raise InvalidInputError(f"invalid task {task.name}: " + "; ".join(violations))
