"""
degenerate.py

The always-available fallback theory: every object gets its own clock of
unary predicates, one per time step, and static rules that restate what the
sequence shows at that step. Base predicates the task never constrains get a
partner that holds for every argument tuple, so they stay false. It captures
no regularity at all, which is what makes it a safe upper bound on the cost of
the best theory.
"""

# --- Standard Library Imports ---
import logging
from itertools import product
from typing import Dict, List, Set, Tuple

# --- Local Imports ---
from .logic import (
    Atom, Constraint, Rule, Theory, TypeSignature, causal_rule, completions, constraint_instances,
    exists_unique, static_rule, xor_binary, xor_unary,
)
from .problem import ApperceptionTask

logger = logging.getLogger(__name__)

WORLD_TYPE = 'gen_world'
WORLD_OBJECT = 'gen_w'


def clock_predicate(i: int, j: int) -> str:
    return f"gen_p{i}_{j}"


def part_predicate(type_name: str) -> str:
    return f"gen_in_{type_name}"


def absent_partner(pred: str) -> str:
    return f"gen_not_{pred}"


def _variables(type_name: str) -> Tuple[str, str]:
    return f"gen_x_{type_name}", f"gen_y_{type_name}"


def _filled_states(task: ApperceptionTask) -> List[frozenset]:
    """Each observed state completed to one that satisfies the given constraints."""
    instances = constraint_instances(task.base_sig, task.given_constraints)
    filled = []
    for t, state in enumerate(task.seq.states, start=1):
        found = next(completions(instances, state), None)
        if found is None:
            logger.warning(f"Warning: state {t} of {task.name} has no completion; keeping it as observed")
            found = state
        filled.append(found)
    return filled


def build_degenerate_theory(task: ApperceptionTask) -> Theory:
    base = task.base_sig
    objects = sorted(base.objects)
    index = {name: i for i, (name, _) in enumerate(objects, start=1)}
    horizon = len(task.seq)
    types = sorted(set(base.types))

    clocks: Dict[str, List[str]] = {t: [] for t in types}
    predicates: Dict[str, Tuple[str, ...]] = {}
    for name, type_name in objects:
        for j in range(1, horizon + 1):
            pred = clock_predicate(index[name], j)
            predicates[pred] = (type_name,)
            clocks[type_name].append(pred)
    for type_name, family in clocks.items():
        if len(family) == 1:
            idle = f"gen_idle_{type_name}"
            predicates[idle] = (type_name,)
            family.append(idle)
    for type_name in types:
        predicates[part_predicate(type_name)] = (type_name, WORLD_TYPE)
    constrained = {p for c in task.given_constraints for p in c.predicates}
    unused = [(pred, arg_types) for pred, arg_types in base.predicates if pred not in constrained]
    for pred, arg_types in unused:
        predicates[absent_partner(pred)] = arg_types
    variables = {v: t for t in types for v in _variables(t)}

    sig = base.extend(types=[WORLD_TYPE], objects={WORLD_OBJECT: WORLD_TYPE},
                      predicates=predicates, variables=variables)

    rules: Set[Rule] = set()
    for name, type_name in objects:
        x, _ = _variables(type_name)
        for j in range(1, horizon):
            rules.add(causal_rule([Atom(clock_predicate(index[name], j), (x,))],
                                  Atom(clock_predicate(index[name], j + 1), (x,))))

    types_of = base.object_types
    for j, state in enumerate(_filled_states(task), start=1):
        for item in state:
            if len(item.args) == 1:
                (obj,) = item.args
                x, _ = _variables(types_of[obj])
                rules.add(static_rule([Atom(clock_predicate(index[obj], j), (x,))], Atom(item.pred, (x,))))
            else:
                first, second = item.args
                x, _ = _variables(types_of[first])
                y = _variables(types_of[second])[1 if types_of[second] == types_of[first] else 0]
                body = [Atom(clock_predicate(index[first], j), (x,)), Atom(clock_predicate(index[second], j), (y,))]
                rules.add(static_rule(body, Atom(item.pred, (x, y))))

    constraints: List[Constraint] = list(task.given_constraints)
    constraints += [xor_unary(t, family) for t, family in clocks.items() if family]
    constraints += [exists_unique(part_predicate(t)) for t in types]

    inits = {Atom(clock_predicate(index[name], 1), (name,)) for name, _ in objects}
    inits |= {Atom(part_predicate(type_name), (name, WORLD_OBJECT)) for name, type_name in objects}

    # predicates the task never uses stay false: their partner holds everywhere
    for pred, arg_types in unused:
        partner = absent_partner(pred)
        if len(arg_types) == 1:
            constraints.append(xor_unary(arg_types[0], [pred, partner]))
        else:
            constraints.append(xor_binary(arg_types[0], arg_types[1], [pred, partner]))
        inits |= {Atom(partner, args) for args in product(*(base.objects_of(t) for t in arg_types))}

    theory = Theory(signature=sig, inits=frozenset(inits), rules=tuple(rules), constraints=tuple(constraints))
    logger.debug(f"Degenerate theory for {task.name}: {len(predicates)} invented predicates, {len(rules)} rules")
    return theory
