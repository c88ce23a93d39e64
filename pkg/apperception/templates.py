"""
templates.py

Fair enumeration of templates: signature extensions plus bounds on the number
of static rules, causal rules and body atoms.

Row t of the (t, n) table holds the base types plus t - 1 invented types.
Every template of a row starts from the same floor, the smallest extension
that can hold a rule: a body bound of one and, when the base has no
variables, one invented variable. Above the floor, templates are the
compositions of k = 1, 2, ... into seven counts (causal rules, static rules,
variables, unary predicates, objects, binary predicates, body atoms), so
complexity never decreases along a row and every count vector is reached
after finitely many steps.
"""

# --- Standard Library Imports ---
from itertools import count, islice, product
from typing import Dict, Iterator, List, Sequence, Set, Tuple

# --- Third-party Library Imports ---
from pydantic import BaseModel, ConfigDict, Field

# --- Local Imports ---
from .config import TEMPLATE_BATCH_STEP
from .logic import TypeSignature

COUNT_FIELDS = ('n_causal', 'n_static', 'variables', 'unary', 'objects', 'binary', 'n_body')
SYMBOL_FIELDS = ('variables', 'unary', 'objects', 'binary')


# --- Pydantic Data Models ---

class TemplateDelta(BaseModel):
    """What a template adds to the base signature, plus its three bounds."""
    model_config = ConfigDict(frozen=True)

    types: Tuple[str, ...] = Field(default=(), description="Invented types.")
    objects: Tuple[Tuple[str, str], ...] = Field(default=(), description="Invented (object, type) pairs.")
    predicates: Tuple[Tuple[str, Tuple[str, ...]], ...] = Field(default=(), description="Invented predicates.")
    variables: Tuple[Tuple[str, str], ...] = Field(default=(), description="Extra (variable, type) pairs.")
    n_static: int = Field(default=0, ge=0)
    n_causal: int = Field(default=0, ge=0)
    n_body: int = Field(default=0, ge=0)

    def complexity(self) -> int:
        return (len(self.types) + len(self.objects) + len(self.predicates) + len(self.variables)
                + self.n_static + self.n_causal + self.n_body)


class Template(BaseModel):
    """An extended signature and the rule bounds that circumscribe one search stratum."""
    model_config = ConfigDict(frozen=True)

    signature: TypeSignature
    n_static: int = Field(ge=0, description="Max static rules.")
    n_causal: int = Field(ge=0, description="Max causal rules.")
    n_body: int = Field(ge=0, description="Max body atoms per rule.")
    delta: TemplateDelta = Field(default_factory=TemplateDelta, description="How the signature was extended.")

    @classmethod
    def from_delta(cls, base: TypeSignature, delta: TemplateDelta) -> 'Template':
        sig = TypeSignature(
            types=base.types + delta.types,
            objects=base.objects + delta.objects,
            predicates=base.predicates + delta.predicates,
            variables=base.variables + delta.variables,
        )
        return cls(signature=sig, n_static=delta.n_static, n_causal=delta.n_causal,
                   n_body=delta.n_body, delta=delta)

    def describe(self) -> str:
        d = self.delta
        unary = sum(1 for _, arg_types in d.predicates if len(arg_types) == 1)
        return (f"types+{len(d.types)} objects+{len(d.objects)} unary+{unary} binary+{len(d.predicates) - unary} "
                f"vars+{len(d.variables)} static<={self.n_static} causal<={self.n_causal} body<={self.n_body}")


# --- Enumeration ---

def enumerate_type_count_pairs(step: int = TEMPLATE_BATCH_STEP) -> Iterator[Tuple[int, int]]:
    """(1,s), (1,2s), (2,s), (1,3s), (2,2s), (3,s), ... along the diagonals.

    t names a row whose templates carry t - 1 invented types on top of the base
    types; n is how many of that row's templates have been released so far.
    """
    for diagonal in count(1):
        for t in range(1, diagonal + 1):
            yield t, (diagonal - t + 1) * step


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ways to write `total` as `parts` nonnegative counts, earlier parts largest first."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _fresh_names(prefix: str, taken: Set[str], n: int) -> List[str]:
    names: List[str] = []
    i = 1
    while len(names) < n:
        candidate = f"{prefix}{i}"
        if candidate not in taken:
            names.append(candidate)
        i += 1
    return names


def make_delta(base: TypeSignature, extra_types: int, counts: Sequence[int]) -> TemplateDelta:
    """Invents symbols for one count vector (ordered as COUNT_FIELDS) on top of the row floor.

    Invented objects, predicates and variables take types round-robin; with no
    type to give them, none are invented.
    """
    wanted = dict(zip(COUNT_FIELDS, counts))
    taken = ({t for t in base.types} | {n for n, _ in base.objects}
             | {n for n, _ in base.predicates} | {n for n, _ in base.variables})

    types = _fresh_names('gen_t', taken, extra_types)
    ordered_types = sorted(set(base.types)) + types
    if not ordered_types:
        return TemplateDelta(n_static=wanted['n_static'], n_causal=wanted['n_causal'], n_body=wanted['n_body'] + 1)
    pairs = list(product(ordered_types, repeat=2))
    n_vars = wanted['variables'] + (0 if base.variables else 1)

    objects = [(name, ordered_types[i % len(ordered_types)])
               for i, name in enumerate(_fresh_names('gen_o', taken, wanted['objects']))]
    unary = [(name, (ordered_types[i % len(ordered_types)],))
             for i, name in enumerate(_fresh_names('gen_p', taken, wanted['unary']))]
    binary = [(name, pairs[i % len(pairs)])
              for i, name in enumerate(_fresh_names('gen_r', taken, wanted['binary']))]
    variables = [(name, ordered_types[i % len(ordered_types)])
                 for i, name in enumerate(_fresh_names('gen_v', taken, n_vars))]
    return TemplateDelta(types=tuple(types), objects=tuple(objects), predicates=tuple(unary + binary),
                         variables=tuple(variables), n_static=wanted['n_static'], n_causal=wanted['n_causal'],
                         n_body=wanted['n_body'] + 1)


def _row(base: TypeSignature, t: int) -> Iterator[Template]:
    symbol_slots = [COUNT_FIELDS.index(f) for f in SYMBOL_FIELDS]
    typeless = not base.types and t == 1
    for total in count(1):
        for counts in compositions(total, len(COUNT_FIELDS)):
            if typeless and any(counts[i] for i in symbol_slots):
                continue
            yield Template.from_delta(base, make_delta(base, t - 1, counts))


def enumerate_templates(base: TypeSignature, batch_step: int = TEMPLATE_BATCH_STEP) -> Iterator[Template]:
    """Infinite, duplicate-free, fair stream of templates extending `base`.

    Each visit of (t, n) emits the templates of row t with indices up to n that
    earlier visits have not emitted yet.
    """
    if batch_step < 1:
        raise ValueError("batch_step must be positive")
    rows: Dict[int, Iterator[Template]] = {}
    emitted: Dict[int, int] = {}
    for t, n in enumerate_type_count_pairs(batch_step):
        row = rows.setdefault(t, _row(base, t))
        done = emitted.get(t, 0)
        yield from islice(row, n - done)
        emitted[t] = n
