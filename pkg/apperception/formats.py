"""
formats.py

Plain-text formats: theory files (SIGNATURE / INIT / RULES / CONSTRAINTS),
template files (SIGNATURE / BOUNDS) and trace dumps. Output is canonical so
files can be compared byte for byte.
"""

# --- Standard Library Imports ---
import re
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

# --- Local Imports ---
from .errors import InvalidInputError
from .logic import (
    Atom, Constraint, Rule, Theory, TypeSignature, exists_unique, parse_atom, static_rule, causal_rule,
    validate_signature, validate_theory, xor_binary, xor_unary,
)
from .templates import Template

THEORY_SECTIONS = ('SIGNATURE', 'INIT', 'RULES', 'CONSTRAINTS')
TEMPLATE_SECTIONS = ('SIGNATURE', 'BOUNDS')

_TYPE_LINE = re.compile(r'^type\s+(\S+)$')
_OBJECT_LINE = re.compile(r'^object\s+(\S+)\s*:\s*(\S+)$')
_VARIABLE_LINE = re.compile(r'^variable\s+(\S+)\s*:\s*(\S+)$')
_PREDICATE_LINE = re.compile(r'^predicate\s+([A-Za-z][A-Za-z0-9_]*)\s*\(([^()]*)\)$')
_XOR_LINE = re.compile(r'^xor\s+([^:]+):\s*(.+)$')
_UNIQUE_LINE = re.compile(r'^unique\s+(\S+)$')
_BOUND_LINE = re.compile(r'^(static|causal|body)\s+(\d+)$')
_ATOM_TOKEN = re.compile(r'[A-Za-z][A-Za-z0-9_]*\s*\([^()]*\)')


# --- Section Handling ---

def split_sections(text: str, allowed: Sequence[str]) -> Dict[str, List[Tuple[int, str]]]:
    """Groups non-comment lines under their section header, keeping line numbers."""
    sections: Dict[str, List[Tuple[int, str]]] = {}
    current: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if line in allowed:
            if line in sections:
                raise InvalidInputError(f"line {number}: section {line} appears twice")
            current = line
            sections[current] = []
            continue
        if current is None:
            raise InvalidInputError(f"line {number}: content before the first section header")
        sections[current].append((number, line))
    return sections


def format_signature_lines(sig: TypeSignature) -> List[str]:
    lines = [f"type {t}" for t in sig.types]
    lines += [f"object {name}: {t}" for name, t in sig.objects]
    lines += [f"predicate {name}({','.join(args)})" for name, args in sig.predicates]
    lines += [f"variable {name}: {t}" for name, t in sig.variables]
    return lines


def parse_signature_lines(lines: Iterable[Tuple[int, str]]) -> TypeSignature:
    types: List[str] = []
    objects: List[Tuple[str, str]] = []
    predicates: List[Tuple[str, Tuple[str, ...]]] = []
    variables: List[Tuple[str, str]] = []
    for number, line in lines:
        if match := _TYPE_LINE.match(line):
            types.append(match.group(1))
        elif match := _OBJECT_LINE.match(line):
            objects.append((match.group(1), match.group(2)))
        elif match := _VARIABLE_LINE.match(line):
            variables.append((match.group(1), match.group(2)))
        elif match := _PREDICATE_LINE.match(line):
            args = tuple(a.strip() for a in match.group(2).split(',') if a.strip())
            predicates.append((match.group(1), args))
        else:
            raise InvalidInputError(f"line {number}: cannot read signature entry {line!r}")
    sig = TypeSignature(types=tuple(types), objects=tuple(objects),
                        predicates=tuple(predicates), variables=tuple(variables))
    violations = validate_signature(sig)
    if violations:
        raise InvalidInputError("invalid signature: " + "; ".join(violations))
    return sig


def parse_constraint(line: str, number: int = 0) -> Constraint:
    if match := _UNIQUE_LINE.match(line):
        return exists_unique(match.group(1))
    if match := _XOR_LINE.match(line):
        types = [t.strip() for t in match.group(1).split(',')]
        preds = [p.strip() for p in match.group(2).split(',') if p.strip()]
        if len(types) == 1:
            return xor_unary(types[0], preds)
        if len(types) == 2:
            return xor_binary(types[0], types[1], preds)
    raise InvalidInputError(f"line {number}: cannot read constraint {line!r}")


def parse_rule(line: str, number: int = 0) -> Rule:
    for arrow, build in (('>>', causal_rule), ('->', static_rule)):
        if arrow in line:
            body_text, head_text = line.split(arrow, 1)
            tokens = _ATOM_TOKEN.findall(body_text)
            leftover = _ATOM_TOKEN.sub('', body_text).replace(',', '').strip()
            if not tokens or leftover:
                raise InvalidInputError(f"line {number}: cannot read rule body {body_text.strip()!r}")
            return build([parse_atom(t) for t in tokens], parse_atom(head_text))
    raise InvalidInputError(f"line {number}: rule needs '->' or '>>': {line!r}")


# --- Theories ---

def format_theory(theory: Theory, comment: Optional[str] = None) -> str:
    lines: List[str] = []
    if comment:
        lines += [f"# {part}" for part in comment.splitlines()]
    lines.append('SIGNATURE')
    lines += format_signature_lines(theory.signature)
    lines.append('INIT')
    lines += [str(a) for a in sorted(theory.inits)]
    lines.append('RULES')
    lines += [str(r) for r in theory.rules]
    lines.append('CONSTRAINTS')
    lines += [str(c) for c in theory.constraints]
    return '\n'.join(lines) + '\n'


def parse_theory(text: str) -> Theory:
    sections = split_sections(text, THEORY_SECTIONS)
    if 'SIGNATURE' not in sections:
        raise InvalidInputError("theory file has no SIGNATURE section")
    sig = parse_signature_lines(sections['SIGNATURE'])
    inits = [parse_atom(line) for _, line in sections.get('INIT', [])]
    rules = [parse_rule(line, n) for n, line in sections.get('RULES', [])]
    constraints = [parse_constraint(line, n) for n, line in sections.get('CONSTRAINTS', [])]
    theory = Theory(signature=sig, inits=frozenset(inits), rules=tuple(rules), constraints=tuple(constraints))
    violations = validate_theory(theory)
    if violations:
        raise InvalidInputError("invalid theory: " + "; ".join(violations))
    return theory


# --- Templates ---

def format_template(template: Template) -> str:
    lines = ['SIGNATURE'] + format_signature_lines(template.signature)
    lines += ['BOUNDS', f"static {template.n_static}", f"causal {template.n_causal}", f"body {template.n_body}"]
    return '\n'.join(lines) + '\n'


def parse_template(text: str) -> Template:
    sections = split_sections(text, TEMPLATE_SECTIONS)
    if 'SIGNATURE' not in sections or 'BOUNDS' not in sections:
        raise InvalidInputError("template file needs SIGNATURE and BOUNDS sections")
    bounds: Dict[str, int] = {}
    for number, line in sections['BOUNDS']:
        match = _BOUND_LINE.match(line)
        if not match:
            raise InvalidInputError(f"line {number}: cannot read bound {line!r}")
        bounds[match.group(1)] = int(match.group(2))
    missing = {'static', 'causal', 'body'} - set(bounds)
    if missing:
        raise InvalidInputError(f"template file is missing bounds: {', '.join(sorted(missing))}")
    return Template(signature=parse_signature_lines(sections['SIGNATURE']),
                    n_static=bounds['static'], n_causal=bounds['causal'], n_body=bounds['body'])


# --- Traces ---

def format_trace(states: Iterable[Iterable[Atom]], start: int = 1) -> str:
    """One line per step: time, tab, comma-separated canonical atoms."""
    lines = [f"{t}\t{','.join(str(a) for a in sorted(state))}" for t, state in enumerate(states, start=start)]
    return '\n'.join(lines) + '\n'
