"""
logic.py

The typed vocabulary every other module speaks: ground and unground atoms,
static and causal rules, xor / exists-unique constraints, type signatures,
theories and sensory sequences.

Atoms, rules and constraints are NamedTuples so they hash cheaply and sort in
canonical order (name, then arguments). Signatures, theories and sequences are
frozen pydantic models.
"""

# --- Standard Library Imports ---
import re
from collections import defaultdict
from itertools import product
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple

# --- Third-party Library Imports ---
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator

# --- Local Imports ---
from .errors import InvalidInputError

IDENTIFIER = re.compile(r'^[A-Za-z][A-Za-z0-9_]*$')
ATOM_PATTERN = re.compile(r'^\s*([A-Za-z][A-Za-z0-9_]*)\s*\(([^()]*)\)\s*$')

STATIC = 'static'
CAUSAL = 'causal'

XOR_UNARY = 'xor_unary'
XOR_BINARY = 'xor_binary'
EXISTS_UNIQUE = 'exists_unique'


# --- Atoms, Rules, Constraints ---

class Atom(NamedTuple):
    """pred(arg1) or pred(arg1,arg2). Arguments are objects or variables."""
    pred: str
    args: Tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.pred}({','.join(self.args)})"


# Ground and unground atoms share one representation; the signature decides
# whether the arguments are objects or variables.
GroundAtom = Atom
UngroundAtom = Atom


def atom(pred: str, *args: str) -> Atom:
    return Atom(pred, tuple(args))


def parse_atom(text: str) -> Atom:
    """Parses `p(a)` / `p(a,b)`; rejects any other arity."""
    match = ATOM_PATTERN.match(text)
    if not match:
        raise InvalidInputError(f"Malformed atom: {text!r}")
    raw = match.group(2).strip()
    args = tuple(part.strip() for part in raw.split(',')) if raw else ()
    if not 1 <= len(args) <= 2:
        raise InvalidInputError(f"Atom {text!r} must have one or two arguments")
    if any(not IDENTIFIER.match(arg) for arg in args):
        raise InvalidInputError(f"Atom {text!r} has a non-identifier argument")
    return Atom(match.group(1), args)


class Rule(NamedTuple):
    kind: str
    body: Tuple[Atom, ...]
    head: Atom

    @property
    def cost(self) -> int:
        return len(self.body) + 1

    @property
    def is_static(self) -> bool:
        return self.kind == STATIC

    def variables(self) -> Tuple[str, ...]:
        """Variables in order of first occurrence (body, then head)."""
        seen: List[str] = []
        for item in self.body + (self.head,):
            for arg in item.args:
                if arg not in seen:
                    seen.append(arg)
        return tuple(seen)

    def __str__(self) -> str:
        arrow = '->' if self.kind == STATIC else '>>'
        return f"{', '.join(str(a) for a in self.body)} {arrow} {self.head}"


def static_rule(body: Iterable[Atom], head: Atom) -> Rule:
    return Rule(STATIC, tuple(sorted(set(body))), head)


def causal_rule(body: Iterable[Atom], head: Atom) -> Rule:
    return Rule(CAUSAL, tuple(sorted(set(body))), head)


class Constraint(NamedTuple):
    """XorUnary / XorBinary over `predicates`, or ExistsUnique over one binary predicate."""
    kind: str
    types: Tuple[str, ...]
    predicates: Tuple[str, ...]

    def __str__(self) -> str:
        if self.kind == EXISTS_UNIQUE:
            return f"unique {self.predicates[0]}"
        return f"xor {','.join(self.types)}: {','.join(self.predicates)}"


def xor_unary(subject_type: str, predicates: Iterable[str]) -> Constraint:
    return Constraint(XOR_UNARY, (subject_type,), tuple(sorted(set(predicates))))


def xor_binary(first_type: str, second_type: str, predicates: Iterable[str]) -> Constraint:
    return Constraint(XOR_BINARY, (first_type, second_type), tuple(sorted(set(predicates))))


def exists_unique(predicate: str) -> Constraint:
    return Constraint(EXISTS_UNIQUE, (), (predicate,))


# --- Pydantic Data Models ---

class TypeSignature(BaseModel):
    """The typed vocabulary (T, O, P, V) that scopes all grounding.

    Declarations are kept as sorted tuples of pairs, so duplicate names survive
    construction and are reported by `validate_signature`.
    """
    model_config = ConfigDict(frozen=True)

    types: Tuple[str, ...] = Field(default=(), description="Type names.")
    objects: Tuple[Tuple[str, str], ...] = Field(default=(), description="(object, type) declarations.")
    predicates: Tuple[Tuple[str, Tuple[str, ...]], ...] = Field(
        default=(), description="(predicate, argument types) declarations; arity 1 or 2.")
    variables: Tuple[Tuple[str, str], ...] = Field(default=(), description="(variable, type) declarations.")

    _object_types: Dict[str, str] = PrivateAttr(default_factory=dict)
    _predicate_types: Dict[str, Tuple[str, ...]] = PrivateAttr(default_factory=dict)
    _variable_types: Dict[str, str] = PrivateAttr(default_factory=dict)
    _objects_by_type: Dict[str, Tuple[str, ...]] = PrivateAttr(default_factory=dict)
    _variables_by_type: Dict[str, Tuple[str, ...]] = PrivateAttr(default_factory=dict)

    @field_validator('types', 'objects', 'predicates', 'variables')
    @classmethod
    def _canonical_order(cls, value):
        return tuple(sorted(value))

    def model_post_init(self, __context) -> None:
        self._object_types = dict(self.objects)
        self._predicate_types = dict(self.predicates)
        self._variable_types = dict(self.variables)
        objects_by_type: Dict[str, List[str]] = defaultdict(list)
        for name, type_name in self.objects:
            objects_by_type[type_name].append(name)
        variables_by_type: Dict[str, List[str]] = defaultdict(list)
        for name, type_name in self.variables:
            variables_by_type[type_name].append(name)
        self._objects_by_type = {k: tuple(v) for k, v in objects_by_type.items()}
        self._variables_by_type = {k: tuple(v) for k, v in variables_by_type.items()}

    @classmethod
    def build(cls, types: Iterable[str] = (), objects: Optional[Dict[str, str]] = None,
              predicates: Optional[Dict[str, Sequence[str]]] = None,
              variables: Optional[Dict[str, str]] = None) -> 'TypeSignature':
        return cls(
            types=tuple(types),
            objects=tuple((objects or {}).items()),
            predicates=tuple((name, tuple(args)) for name, args in (predicates or {}).items()),
            variables=tuple((variables or {}).items()),
        )

    @property
    def object_types(self) -> Dict[str, str]:
        return self._object_types

    @property
    def predicate_types(self) -> Dict[str, Tuple[str, ...]]:
        return self._predicate_types

    @property
    def variable_types(self) -> Dict[str, str]:
        return self._variable_types

    def objects_of(self, type_name: str) -> Tuple[str, ...]:
        return self._objects_by_type.get(type_name, ())

    def variables_of(self, type_name: str) -> Tuple[str, ...]:
        return self._variables_by_type.get(type_name, ())

    def arity(self, predicate: str) -> int:
        return len(self._predicate_types[predicate])

    def extend(self, types: Iterable[str] = (), objects: Optional[Dict[str, str]] = None,
               predicates: Optional[Dict[str, Sequence[str]]] = None,
               variables: Optional[Dict[str, str]] = None) -> 'TypeSignature':
        """A new signature with the given declarations appended."""
        return TypeSignature(
            types=self.types + tuple(types),
            objects=self.objects + tuple((objects or {}).items()),
            predicates=self.predicates + tuple((n, tuple(a)) for n, a in (predicates or {}).items()),
            variables=self.variables + tuple((variables or {}).items()),
        )

    def extends(self, base: 'TypeSignature') -> bool:
        return (set(base.types) <= set(self.types)
                and set(base.objects) <= set(self.objects)
                and set(base.predicates) <= set(self.predicates)
                and set(base.variables) <= set(self.variables))


class Theory(BaseModel):
    """theta = (signature, initial conditions, rules, constraints)."""
    model_config = ConfigDict(frozen=True)

    signature: TypeSignature
    inits: FrozenSet[Atom] = Field(default=frozenset(), description="Initial conditions I.")
    rules: Tuple[Rule, ...] = Field(default=(), description="Static and causal rules R, canonical order.")
    constraints: Tuple[Constraint, ...] = Field(default=(), description="Constraints C, canonical order.")

    @field_validator('rules', 'constraints')
    @classmethod
    def _sorted_unique(cls, value):
        return tuple(sorted(set(value)))

    @property
    def static_rules(self) -> Tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.kind == STATIC)

    @property
    def causal_rules(self) -> Tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.kind == CAUSAL)


class SensorySequence(BaseModel):
    """S_1..S_T; states may be partial."""
    model_config = ConfigDict(frozen=True)

    states: Tuple[FrozenSet[Atom], ...] = Field(default=(), description="States in time order, S_1 first.")

    @classmethod
    def of(cls, states: Iterable[Iterable[Atom]]) -> 'SensorySequence':
        return cls(states=tuple(frozenset(s) for s in states))

    def __len__(self) -> int:
        return len(self.states)

    def state(self, t: int) -> FrozenSet[Atom]:
        """1-based access."""
        return self.states[t - 1]

    def atoms(self) -> FrozenSet[Atom]:
        return frozenset().union(*self.states) if self.states else frozenset()

    def atom_count(self) -> int:
        return sum(len(s) for s in self.states)


# --- Well-typedness ---

def is_ground_atom(sig: TypeSignature, item: Atom) -> bool:
    arg_types = sig.predicate_types.get(item.pred)
    if arg_types is None or len(arg_types) != len(item.args):
        return False
    return all(sig.object_types.get(arg) == t for arg, t in zip(item.args, arg_types))


def is_unground_atom(sig: TypeSignature, item: Atom) -> bool:
    arg_types = sig.predicate_types.get(item.pred)
    if arg_types is None or len(arg_types) != len(item.args):
        return False
    return all(sig.variable_types.get(arg) == t for arg, t in zip(item.args, arg_types))


def validate_signature(sig: TypeSignature) -> List[str]:
    """Every TypeSignature invariant violation; empty means valid."""
    violations: List[str] = []
    known_types = set(sig.types)

    for kind, names in (('type', list(sig.types)),
                        ('object', [n for n, _ in sig.objects]),
                        ('predicate', [n for n, _ in sig.predicates]),
                        ('variable', [n for n, _ in sig.variables])):
        seen: Set[str] = set()
        for name in names:
            if name in seen:
                violations.append(f"duplicate {kind} name {name}")
            seen.add(name)
            if not IDENTIFIER.match(name):
                violations.append(f"{kind} name {name!r} is not an identifier")

    namespaces = (('object', {n for n, _ in sig.objects}),
                  ('predicate', {n for n, _ in sig.predicates}),
                  ('variable', {n for n, _ in sig.variables}))
    for i, (kind_a, names_a) in enumerate(namespaces):
        for kind_b, names_b in namespaces[i + 1:]:
            for name in sorted(names_a & names_b):
                violations.append(f"name {name} is both a {kind_a} and a {kind_b}")

    for name, type_name in sig.objects:
        if type_name not in known_types:
            violations.append(f"object {name} has unknown type {type_name}")
    for name, arg_types in sig.predicates:
        if not 1 <= len(arg_types) <= 2:
            violations.append(f"predicate {name} has arity {len(arg_types)}, expected 1 or 2")
        unknown = [t for t in arg_types if t not in known_types]
        if unknown:
            violations.append(f"predicate {name} references unknown type {','.join(unknown)}")
    for name, type_name in sig.variables:
        if type_name not in known_types:
            violations.append(f"variable {name} has unknown type {type_name}")
    return violations


def validate_constraints(sig: TypeSignature, constraints: Iterable[Constraint]) -> List[str]:
    violations: List[str] = []
    for c in constraints:
        if c.kind == EXISTS_UNIQUE:
            if len(c.predicates) != 1 or len(sig.predicate_types.get(c.predicates[0], ())) != 2:
                violations.append(f"constraint '{c}' needs one binary predicate")
            continue
        arity = 1 if c.kind == XOR_UNARY else 2
        if c.kind not in (XOR_UNARY, XOR_BINARY) or len(c.types) != arity:
            violations.append(f"constraint '{c}' is malformed")
            continue
        if len(c.predicates) < 2:
            violations.append(f"constraint '{c}' needs at least two predicates")
        for p in c.predicates:
            if sig.predicate_types.get(p) != c.types:
                violations.append(f"constraint '{c}' lists {p} whose argument types differ")
    return violations


def validate_theory(theory: Theory) -> List[str]:
    """Signature, init, rule and constraint violations of a theory."""
    sig = theory.signature
    violations = validate_signature(sig)
    for item in sorted(theory.inits):
        if not is_ground_atom(sig, item):
            violations.append(f"initial atom {item} is not well-typed")
    for rule in theory.rules:
        if rule.kind not in (STATIC, CAUSAL):
            violations.append(f"rule '{rule}' has unknown kind {rule.kind}")
        if not rule.body:
            violations.append(f"rule '{rule}' has an empty body")
        for item in rule.body + (rule.head,):
            if not is_unground_atom(sig, item):
                violations.append(f"rule '{rule}' atom {item} is not well-typed")
        body_vars = {arg for item in rule.body for arg in item.args}
        if not set(rule.head.args) <= body_vars:
            violations.append(f"rule '{rule}' has head variables missing from its body")
    violations.extend(validate_constraints(sig, theory.constraints))
    return violations


def is_suitable(sig: TypeSignature, seq: SensorySequence) -> bool:
    """True iff every atom of the sequence is well-typed under the signature."""
    return all(is_ground_atom(sig, item) for state in seq.states for item in state)


def enumerate_atoms(sig: TypeSignature) -> Tuple[FrozenSet[Atom], FrozenSet[Atom]]:
    """(G, U): all well-typed ground atoms and all well-typed unground atoms."""
    ground: Set[Atom] = set()
    unground: Set[Atom] = set()
    for name, arg_types in sig.predicates:
        for args in product(*(sig.objects_of(t) for t in arg_types)):
            ground.add(Atom(name, args))
        for args in product(*(sig.variables_of(t) for t in arg_types)):
            unground.add(Atom(name, args))
    return frozenset(ground), frozenset(unground)


def cost(theory: Theory) -> int:
    """|I| plus body length + 1 for every rule."""
    return len(theory.inits) + sum(rule.cost for rule in theory.rules)


def incompossible(a: Atom, b: Atom, constraints: Iterable[Constraint]) -> bool:
    """True iff some constraint instance forbids a and b being true together."""
    if a == b:
        return False
    for c in constraints:
        if c.kind == EXISTS_UNIQUE:
            p = c.predicates[0]
            if (a.pred == p and b.pred == p and len(a.args) == 2 and len(b.args) == 2
                    and a.args[0] == b.args[0] and a.args[1] != b.args[1]):
                return True
        elif a.pred in c.predicates and b.pred in c.predicates and a.args == b.args:
            if len(a.args) == (1 if c.kind == XOR_UNARY else 2):
                return True
    return False


# --- Constraint Instances ---

class ConstraintInstance(NamedTuple):
    """One grounding of a constraint: exactly one of `atoms` must hold."""
    constraint: Constraint
    subject: Tuple[str, ...]
    atoms: Tuple[Atom, ...]

    def __str__(self) -> str:
        return f"{self.constraint} on {','.join(self.subject)}"


def constraint_instances(sig: TypeSignature, constraints: Iterable[Constraint]) -> Tuple[ConstraintInstance, ...]:
    """Ground constraint instances in canonical order (constraint, then subject)."""
    instances: List[ConstraintInstance] = []
    for c in sorted(set(constraints)):
        if c.kind == XOR_UNARY:
            for x in sig.objects_of(c.types[0]):
                instances.append(ConstraintInstance(c, (x,), tuple(Atom(p, (x,)) for p in c.predicates)))
        elif c.kind == XOR_BINARY:
            for x, y in product(sig.objects_of(c.types[0]), sig.objects_of(c.types[1])):
                instances.append(ConstraintInstance(c, (x, y), tuple(Atom(p, (x, y)) for p in c.predicates)))
        else:
            p = c.predicates[0]
            first, second = sig.predicate_types[p]
            for x in sig.objects_of(first):
                instances.append(ConstraintInstance(c, (x,), tuple(Atom(p, (x, y)) for y in sig.objects_of(second))))
    return tuple(instances)


def violated_instance(state: FrozenSet[Atom], instances: Sequence[ConstraintInstance]) -> Optional[ConstraintInstance]:
    """First instance that does not hold exactly once in the state."""
    for inst in instances:
        count = 0
        for item in inst.atoms:
            if item in state:
                count += 1
        if count != 1:
            return inst
    return None


def completions(instances: Sequence[ConstraintInstance],
                required: FrozenSet[Atom] = frozenset()) -> Iterator[FrozenSet[Atom]]:
    """Every state containing `required` that picks exactly one atom per instance.

    Atoms outside all instances appear only if they are in `required`.
    """
    chosen: Set[Atom] = set(required)
    forbidden: Set[Atom] = set()

    def backtrack(i: int) -> Iterator[FrozenSet[Atom]]:
        if i == len(instances):
            yield frozenset(chosen)
            return
        inst = instances[i]
        present = [a for a in inst.atoms if a in chosen]
        if len(present) > 1:
            return
        options = present if present else [a for a in inst.atoms if a not in forbidden]
        for pick in options:
            added = pick not in chosen
            chosen.add(pick)
            newly = [b for b in inst.atoms if b != pick and b not in forbidden]
            forbidden.update(newly)
            yield from backtrack(i + 1)
            forbidden.difference_update(newly)
            if added:
                chosen.discard(pick)

    yield from backtrack(0)


def is_extendable(instances: Sequence[ConstraintInstance], state: FrozenSet[Atom]) -> bool:
    return next(completions(instances, state), None) is not None


class Exclusions:
    """Incompossibility lookup for one signature and constraint set."""

    def __init__(self, sig: TypeSignature, constraints: Iterable[Constraint]):
        self._unary: Dict[str, Set[str]] = defaultdict(set)
        self._binary: Dict[str, Set[str]] = defaultdict(set)
        self._unique: Dict[str, Tuple[str, ...]] = {}
        self._cache: Dict[Atom, FrozenSet[Atom]] = {}
        for c in constraints:
            if c.kind == EXISTS_UNIQUE:
                p = c.predicates[0]
                self._unique[p] = sig.objects_of(sig.predicate_types[p][1])
            else:
                table = self._unary if c.kind == XOR_UNARY else self._binary
                for p in c.predicates:
                    table[p].update(q for q in c.predicates if q != p)

    def rivals(self, item: Atom) -> FrozenSet[Atom]:
        """Ground atoms incompossible with `item`."""
        found = self._cache.get(item)
        if found is not None:
            return found
        out: Set[Atom] = set()
        if len(item.args) == 1:
            out.update(Atom(p, item.args) for p in self._unary.get(item.pred, ()))
        else:
            out.update(Atom(p, item.args) for p in self._binary.get(item.pred, ()))
            others = self._unique.get(item.pred)
            if others:
                x, y = item.args
                out.update(Atom(item.pred, (x, z)) for z in others if z != y)
        found = frozenset(out)
        self._cache[item] = found
        return found

    def clashes(self, item: Atom, atoms) -> bool:
        return not self.rivals(item).isdisjoint(atoms)

    def unground_clash(self, a: Atom, b: Atom) -> bool:
        """Incompossible under every substitution (xor on identical arguments)."""
        if a.args != b.args or a.pred == b.pred:
            return False
        table = self._unary if len(a.args) == 1 else self._binary
        return b.pred in table.get(a.pred, ())
