"""
search.py

Candidate generation for the per-template search: rules over the unground
atoms of a signature, the constraint sets that can make a signature
conceptually unified, initial states with their minimal initial conditions,
and rule sets of a given total cost.
"""

# --- Standard Library Imports ---
import logging
from itertools import combinations, permutations, product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

# --- Local Imports ---
from .config import FREE_INIT_LIMIT
from .logic import (
    CAUSAL, STATIC, Atom, Constraint, Exclusions, Rule, SensorySequence, TypeSignature,
    completions, constraint_instances, enumerate_atoms, exists_unique, xor_binary, xor_unary,
)
from .trace import Evaluator

logger = logging.getLogger(__name__)

Renaming = Dict[str, str]


# --- Rule Candidates ---

def variable_renamings(sig: TypeSignature) -> List[Renaming]:
    """Every type-preserving permutation of the signature's variables."""
    per_type = [[dict(zip(vs, p)) for p in permutations(vs)]
                for vs in (sig.variables_of(t) for t in sorted(set(sig.types))) if vs]
    renamings: List[Renaming] = []
    for parts in product(*per_type):
        merged: Renaming = {}
        for part in parts:
            merged.update(part)
        renamings.append(merged)
    return renamings


def rename_rule(rule: Rule, mapping: Renaming) -> Rule:
    def sub(a: Atom) -> Atom:
        return Atom(a.pred, tuple(mapping.get(v, v) for v in a.args))
    return Rule(rule.kind, tuple(sorted({sub(a) for a in rule.body})), sub(rule.head))


def is_canonical(rule: Rule, renamings: Sequence[Renaming]) -> bool:
    """True iff no variable renaming gives a lexicographically smaller rule."""
    return all(rename_rule(rule, m) >= rule for m in renamings)


def rule_candidates(sig: TypeSignature, exclusions: Exclusions, kind: str, n_body: int,
                    symmetry: bool = True) -> Tuple[Rule, ...]:
    """Rules of one kind with 1..n_body body atoms, sorted by (cost, rule).

    Bodies never hold an always-incompossible pair and head variables always
    occur in the body. A static head may not equal or clash with a body atom;
    a causal head may clash (p(X) >> q(X) under p xor q is a state change).
    """
    unground = sorted(enumerate_atoms(sig)[1])
    renamings = variable_renamings(sig) if symmetry else []
    found: List[Rule] = []
    for size in range(1, n_body + 1):
        for body in combinations(unground, size):
            if any(exclusions.unground_clash(a, b) for a, b in combinations(body, 2)):
                continue
            bound = {v for a in body for v in a.args}
            for head in unground:
                if head in body or not set(head.args) <= bound:
                    continue
                if kind == STATIC and any(exclusions.unground_clash(head, b) for b in body):
                    continue
                rule = Rule(kind, body, head)
                if symmetry and not is_canonical(rule, renamings):
                    continue
                found.append(rule)
    found.sort(key=lambda r: (r.cost, r))
    return tuple(found)


# --- Constraint Synthesis ---

def set_partitions(items: Sequence[str]) -> Iterator[List[List[str]]]:
    """All partitions of `items` into nonempty blocks, blocks in order of first element."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]


def _unary_groupings(preds: Sequence[str], type_name: str) -> Iterator[List[Constraint]]:
    for partition in set_partitions(sorted(preds)):
        if all(len(block) >= 2 for block in partition):
            yield [xor_unary(type_name, block) for block in partition]


def _binary_groupings(preds: Sequence[str], types: Tuple[str, str]) -> Iterator[List[Constraint]]:
    for partition in set_partitions(sorted(preds)):
        yield [exists_unique(block[0]) if len(block) == 1 else xor_binary(types[0], types[1], block)
               for block in partition]


def constraint_choices(sig: TypeSignature, given: Iterable[Constraint],
                       skip_conceptual: bool = False) -> Iterator[Tuple[Constraint, ...]]:
    """Constraint sets C' that extend `given` and put every predicate in some constraint.

    Predicates already constrained are left alone. The rest are grouped per
    argument type: unary ones into xor blocks of two or more, binary ones into
    exists-unique singletons or binary xor blocks. A lone unconstrained unary
    predicate of a type admits no grouping, so no choice is produced.
    With `skip_conceptual` the only choice is the empty set.
    """
    if skip_conceptual:
        yield ()
        return
    given = tuple(sorted(set(given)))
    constrained = {p for c in given for p in c.predicates}
    unary: Dict[str, List[str]] = {}
    binary: Dict[Tuple[str, str], List[str]] = {}
    for name, arg_types in sig.predicates:
        if name in constrained:
            continue
        if len(arg_types) == 1:
            unary.setdefault(arg_types[0], []).append(name)
        else:
            binary.setdefault(tuple(arg_types), []).append(name)
    options = [list(_unary_groupings(preds, t)) for t, preds in sorted(unary.items())]
    options += [list(_binary_groupings(preds, ts)) for ts, preds in sorted(binary.items())]
    for picks in product(*options):
        yield tuple(sorted(set(given).union(*picks)))


# --- Initial States ---

class InitialStates:
    """Closed, constraint-respecting first states and the fewest initial atoms that yield them."""

    def __init__(self, sig: TypeSignature, constraints: Iterable[Constraint], free_limit: int = FREE_INIT_LIMIT):
        self.signature = sig
        self.instances = constraint_instances(sig, constraints)
        covered = {a for inst in self.instances for a in inst.atoms}
        self.free = tuple(sorted(enumerate_atoms(sig)[0] - covered))
        self.free_limit = free_limit
        self._states: Dict[FrozenSet[Atom], List[FrozenSet[Atom]]] = {}
        self._minimal: Dict[Tuple[FrozenSet[Atom], Tuple[Rule, ...]], List[Tuple[FrozenSet[Atom], FrozenSet[Atom]]]] = {}

    def states(self, required: FrozenSet[Atom]) -> List[FrozenSet[Atom]]:
        """Every state holding `required`, one atom per constraint instance, few free atoms."""
        cached = self._states.get(required)
        if cached is not None:
            return cached
        found: List[FrozenSet[Atom]] = []
        for base in completions(self.instances, required):
            spare = [a for a in self.free if a not in base]
            for k in range(min(self.free_limit, len(spare)) + 1):
                for extra in combinations(spare, k):
                    found.append(base.union(extra))
        self._states[required] = found
        return found

    def minimal(self, static_rules: Tuple[Rule, ...],
                required: FrozenSet[Atom]) -> List[Tuple[FrozenSet[Atom], FrozenSet[Atom]]]:
        """(I, A_1) pairs, A_1 closed under `static_rules`, sorted by (|I|, I)."""
        key = (required, static_rules)
        cached = self._minimal.get(key)
        if cached is not None:
            return cached
        closer = Evaluator(self.signature, static_rules)
        heads = {r.head.pred for r in static_rules}
        pairs: List[Tuple[FrozenSet[Atom], FrozenSet[Atom]]] = []
        for first in self.states(required):
            if closer.close(set(first)):
                continue
            pairs.append((_fewest_inits(first, heads, closer), first))
        pairs.sort(key=lambda p: (len(p[0]), sorted(p[0]), sorted(p[1])))
        self._minimal[key] = pairs
        return pairs


def _fewest_inits(first: FrozenSet[Atom], heads: Set[str], closer: Evaluator) -> FrozenSet[Atom]:
    mandatory = {a for a in first if a.pred not in heads}
    optional = sorted(first - mandatory)
    for k in range(len(optional) + 1):
        for extra in combinations(optional, k):
            candidate = set(mandatory).union(extra)
            closer.close(candidate)
            if candidate == first:
                return frozenset(mandatory.union(extra))
    return first


# --- Rule Sets ---

def required_head_predicates(seqs: Sequence[SensorySequence], exclusions: Exclusions) -> FrozenSet[str]:
    """Predicates some rule must derive: an atom clashing with an atom one step earlier cannot come from the frame."""
    needed: Set[str] = set()
    for seq in seqs:
        for earlier, later in zip(seq.states, seq.states[1:]):
            for item in later:
                if item.pred not in needed and exclusions.clashes(item, earlier):
                    needed.add(item.pred)
    return frozenset(needed)


def rule_sets(candidates: Sequence[Rule], level: int, n_static: int, n_causal: int,
              required_heads: FrozenSet[str] = frozenset()) -> Iterator[Tuple[Rule, ...]]:
    """Strictly increasing rule tuples from `candidates` (sorted by cost) whose costs sum to `level`."""
    chosen: List[Rule] = []

    def extend(start: int, remaining: int, statics: int, causals: int) -> Iterator[Tuple[Rule, ...]]:
        if remaining == 0:
            if required_heads <= {r.head.pred for r in chosen}:
                yield tuple(chosen)
            return
        for i in range(start, len(candidates)):
            rule = candidates[i]
            if rule.cost > remaining:
                break
            if rule.kind == STATIC and statics == 0:
                continue
            if rule.kind == CAUSAL and causals == 0:
                continue
            chosen.append(rule)
            yield from extend(i + 1, remaining - rule.cost,
                              statics - (rule.kind == STATIC), causals - (rule.kind == CAUSAL))
            chosen.pop()

    yield from extend(0, level, n_static, n_causal)


def merge_candidates(*groups: Sequence[Rule]) -> Tuple[Rule, ...]:
    return tuple(sorted((r for g in groups for r in g), key=lambda r: (r.cost, r)))


def max_rule_cost(n_static: int, n_causal: int, n_body: int) -> int:
    return (n_static + n_causal) * (n_body + 1)


def describe_choice(constraints: Tuple[Constraint, ...], given: Optional[Iterable[Constraint]] = None) -> str:
    extra = [str(c) for c in constraints if given is None or c not in set(given)]
    return '; '.join(extra) if extra else '(none)'
