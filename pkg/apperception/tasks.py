"""
tasks.py

Task generators for the experimental domains (elementary cellular automata,
letter sequences, rhythms and tunes, multi-modal binding, occlusion), hidden
atom masking for prediction / retrodiction / imputation, and the task file
format.
"""

# --- Standard Library Imports ---
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

# --- Third-party Library Imports ---
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# --- Local Imports ---
from .errors import InvalidInputError
from .formats import format_signature_lines, parse_constraint, parse_signature_lines, split_sections
from .logic import (
    Atom, Constraint, SensorySequence, TypeSignature, atom, exists_unique, parse_atom, xor_binary, xor_unary,
)
from .problem import ApperceptionTask

logger = logging.getLogger(__name__)

PREDICT = 'predict'
RETRODICT = 'retrodict'
IMPUTE = 'impute'
MODES = (PREDICT, RETRODICT, IMPUTE)

MAX_LEVEL = 3
LEVELS = tuple(f"l{i}" for i in range(MAX_LEVEL + 1))

TASK_SECTIONS = ('TASK', 'SIGNATURE', 'CONSTRAINTS', 'STATES', 'HIDDEN')

HiddenAtom = Tuple[int, Atom]


# --- Pydantic Data Models ---

class MaskedTask(BaseModel):
    """A task whose sequence lacks the `hidden` atoms, which are kept as ground truth."""
    model_config = ConfigDict(frozen=True)

    task: ApperceptionTask = Field(description="Visible atoms only; the sequence spans the full horizon.")
    hidden: FrozenSet[Tuple[int, Atom]] = Field(default=frozenset(), description="(time, atom) ground truth.")
    mode: str = Field(default=PREDICT, description="predict, retrodict or impute.")

    @model_validator(mode='after')
    def _check_hidden(self) -> 'MaskedTask':
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        horizon = len(self.task.seq)
        for t, item in self.hidden:
            if not 1 <= t <= horizon:
                raise ValueError(f"hidden atom {item} at t={t} is outside 1..{horizon}")
            if item in self.task.seq.state(t):
                raise ValueError(f"hidden atom {item} at t={t} is also visible")
            if self.mode == PREDICT and t != horizon:
                raise ValueError(f"predict mode may only hide atoms at t={horizon}")
            if self.mode == RETRODICT and t != 1:
                raise ValueError("retrodict mode may only hide atoms at t=1")
        return self

    @property
    def name(self) -> str:
        return self.task.name

    def hidden_at(self, t: int) -> FrozenSet[Atom]:
        return frozenset(a for s, a in self.hidden if s == t)

    def full_sequence(self) -> SensorySequence:
        """Visible plus hidden atoms."""
        return SensorySequence.of(state | self.hidden_at(t) for t, state in enumerate(self.task.seq.states, start=1))


class EcaSpec(BaseModel):
    """One elementary cellular automaton run on a circular array."""
    model_config = ConfigDict(frozen=True)

    rule_number: int = Field(ge=0, le=255)
    width: int = Field(default=11, ge=3)
    steps: int = Field(default=10, ge=1)
    initial: Tuple[int, ...] = Field(default=(), description="Bit per cell; empty means one on cell in the middle.")

    @field_validator('initial')
    @classmethod
    def _bits(cls, value):
        if any(bit not in (0, 1) for bit in value):
            raise ValueError("initial state must be a bit vector")
        return tuple(value)

    @model_validator(mode='after')
    def _width(self) -> 'EcaSpec':
        if self.initial and len(self.initial) != self.width:
            raise ValueError(f"initial state has {len(self.initial)} cells, width is {self.width}")
        return self

    def start(self) -> np.ndarray:
        return np.array(self.initial, dtype=np.uint8) if self.initial else single_cell_initial(self.width)


# --- Masking ---

def hide_atoms(task: ApperceptionTask, mode: str, count: Optional[int] = None, seed: int = 0,
               predicates: Optional[Iterable[str]] = None) -> MaskedTask:
    """Moves `count` atoms from the sequence into the hidden set.

    predict draws from the last state, retrodict from the first, impute from
    every (t, atom) pair. `predicates` restricts which atoms are eligible;
    `count=None` hides every eligible atom.
    """
    if mode not in MODES:
        raise InvalidInputError(f"unknown mode {mode!r}")
    states = task.seq.states
    if not states:
        raise InvalidInputError("cannot hide atoms of an empty sequence")
    allowed = set(predicates) if predicates is not None else None
    if mode == PREDICT:
        times = [len(states)]
    elif mode == RETRODICT:
        times = [1]
    else:
        times = list(range(1, len(states) + 1))
    eligible = [(t, a) for t in times for a in sorted(states[t - 1]) if allowed is None or a.pred in allowed]
    if count is None:
        count = len(eligible)
    if count > len(eligible):
        raise InvalidInputError(f"cannot hide {count} atoms; only {len(eligible)} are eligible in {mode} mode")
    if count == len(eligible):
        chosen = eligible
    else:
        rng = np.random.default_rng(seed)
        picks = rng.choice(len(eligible), size=count, replace=False)
        chosen = [eligible[i] for i in sorted(int(p) for p in picks)]
    hidden = frozenset(chosen)
    visible = SensorySequence.of(
        state - {a for s, a in hidden if s == t} for t, state in enumerate(states, start=1))
    return MaskedTask(task=task.model_copy(update={'seq': visible}), hidden=hidden, mode=mode)


def _sequence(states: Sequence[Iterable[Atom]]) -> SensorySequence:
    return SensorySequence.of(states)


# --- Elementary Cellular Automata ---

def single_cell_initial(width: int) -> np.ndarray:
    """All off except the middle cell (c6 of 11)."""
    state = np.zeros(width, dtype=np.uint8)
    state[width // 2] = 1
    return state


def eca_next(rule_number: int, state) -> np.ndarray:
    """Next row: cell i takes bit (left<<2 | centre<<1 | right) of the rule number, wrapping at the edges."""
    state = np.asarray(state, dtype=np.uint8)
    if state.ndim != 1 or state.size < 3:
        raise InvalidInputError("an ECA state needs at least 3 cells")
    if not 0 <= rule_number <= 255:
        raise InvalidInputError(f"rule number {rule_number} is outside 0..255")
    table = np.unpackbits(np.array([rule_number], dtype=np.uint8), bitorder='little')
    context = (np.roll(state, 1) << 2) | (state << 1) | np.roll(state, -1)
    return table[context]


def eca_trajectory(spec: EcaSpec) -> np.ndarray:
    """(steps, width) array of rows, the start row first."""
    rows = [spec.start()]
    for _ in range(spec.steps - 1):
        rows.append(eca_next(spec.rule_number, rows[-1]))
    return np.stack(rows)


def cell_name(i: int) -> str:
    return f"c{i}"


def eca_signature(width: int) -> TypeSignature:
    return TypeSignature.build(
        types=['sensor'],
        objects={cell_name(i): 'sensor' for i in range(1, width + 1)},
        predicates={'on': ['sensor'], 'off': ['sensor']},
    )


def eca_states(rows: np.ndarray) -> List[FrozenSet[Atom]]:
    return [frozenset(atom('on' if bit else 'off', cell_name(i)) for i, bit in enumerate(row, start=1))
            for row in rows]


def make_eca_task(spec: EcaSpec, mode: str = PREDICT, count: Optional[int] = None, seed: int = 0) -> MaskedTask:
    """Cells as sensors with on/off readings; the neighbourhood relation is left for the solver to invent."""
    rows = eca_trajectory(spec)
    task = ApperceptionTask(
        name=f"eca{spec.rule_number}_w{spec.width}",
        seq=_sequence(eca_states(rows)),
        base_sig=eca_signature(spec.width),
        given_constraints=(xor_unary('sensor', ['on', 'off']),),
    )
    return hide_atoms(task, mode, count, seed)


# --- Letter Sequences ---

def repeat_pattern(pattern: str, length: int) -> List[str]:
    """`pattern` repeated and cut to `length` symbols."""
    if not pattern:
        raise InvalidInputError("pattern must be nonempty")
    return [pattern[i % len(pattern)] for i in range(length)]


def flip_symbols(symbols: Sequence[str], fraction: float, seed: int = 0,
                 alphabet: Optional[Sequence[str]] = None) -> List[str]:
    """Replaces round(fraction * len) randomly chosen symbols with a different letter of the alphabet."""
    alphabet = sorted(set(alphabet if alphabet is not None else symbols))
    if len(alphabet) < 2:
        raise InvalidInputError("flipping needs at least two letters")
    rng = np.random.default_rng(seed)
    flipped = list(symbols)
    n = int(round(fraction * len(flipped)))
    for i in sorted(int(p) for p in rng.choice(len(flipped), size=n, replace=False)):
        others = [x for x in alphabet if x != flipped[i]]
        flipped[i] = others[int(rng.integers(len(others)))]
    return flipped


def _split_symbols(symbols) -> List[str]:
    if isinstance(symbols, str):
        symbols = [s.strip() for s in symbols.split(',')] if ',' in symbols else list(symbols)
    return [s for s in symbols if s]


def load_sequence_task(symbols, value_alphabet: Optional[Sequence[str]] = None, with_successor: bool = True,
                       name: str = 'sequence', mode: str = PREDICT, count: Optional[int] = None,
                       seed: int = 0) -> MaskedTask:
    """One sensor `s` reads value(s, letter) at every step.

    With `with_successor`, the cyclic successor relation over the alphabet is
    part of every state. Prediction hides the last value atom.
    """
    symbols = _split_symbols(symbols)
    if not symbols:
        raise InvalidInputError("a letter sequence needs at least one symbol")
    alphabet = sorted(set(value_alphabet if value_alphabet is not None else symbols))
    unknown = sorted(set(symbols) - set(alphabet))
    if unknown:
        raise InvalidInputError(f"unknown symbol(s): {', '.join(unknown)}")
    predicates: Dict[str, List[str]] = {'value': ['sensor', 'letter']}
    constraints: List[Constraint] = [exists_unique('value')]
    background: FrozenSet[Atom] = frozenset()
    if with_successor:
        predicates['succ'] = ['letter', 'letter']
        constraints.append(exists_unique('succ'))
        background = frozenset(atom('succ', x, alphabet[(i + 1) % len(alphabet)]) for i, x in enumerate(alphabet))
    sig = TypeSignature.build(types=['sensor', 'letter'],
                              objects={'s': 'sensor', **{x: 'letter' for x in alphabet}},
                              predicates=predicates)
    states = [background | {atom('value', 's', x)} for x in symbols]
    task = ApperceptionTask(name=name, seq=_sequence(states), base_sig=sig, given_constraints=tuple(constraints))
    return hide_atoms(task, mode, count, seed, predicates=['value'])


# --- Rhythms & Tunes ---

TWINKLE = 'ccggaag'
THREE_BLIND_MICE = 'edcedcgffegffe'
TUNE_NOTES = ('c', 'd', 'e', 'f', 'g', 'a', 'b', 'hc')


def melody_presses(notes, spacing: int = 2, start: int = 1) -> List[Tuple[int, str, bool]]:
    """Press list for a melody: one note every `spacing` steps."""
    notes = _split_symbols(notes)
    return [(start + i * spacing, f"s_{n}", True) for i, n in enumerate(notes)]


def _level_relation() -> FrozenSet[Atom]:
    pairs = [(LEVELS[i], LEVELS[max(i - 1, 0)]) for i in range(len(LEVELS))]
    return frozenset(atom('lower', hi, lo) for hi, lo in pairs)


def _decay(pressed: Sequence[bool]) -> List[int]:
    levels, current = [], 0
    for press in pressed:
        current = MAX_LEVEL if press else max(current - 1, 0)
        levels.append(current)
    return levels


def make_rhythm_task(notes: Sequence[Tuple[int, str, bool]], steps: Optional[int] = None,
                     sensors: Optional[Sequence[str]] = None, name: str = 'rhythm',
                     mode: str = PREDICT, count: Optional[int] = None, seed: int = 0) -> MaskedTask:
    """Each sensor reads v(sensor, level): 3 on a press, then one lower per step down to 0.

    Loudness levels are objects l0..l3 linked by the background relation
    lower(l3,l2), lower(l2,l1), lower(l1,l0), lower(l0,l0).
    """
    presses: Dict[Tuple[int, str], bool] = {}
    for t, sensor, press in notes:
        if t < 1:
            raise InvalidInputError(f"press at t={t} is before the first step")
        if presses.get((t, sensor), press) != press:
            raise InvalidInputError(f"inconsistent presses for {sensor} at t={t}")
        presses[(t, sensor)] = press
    sensors = sorted(set(sensors if sensors is not None else (s for _, s in presses)))
    if not sensors:
        raise InvalidInputError("a rhythm task needs at least one sensor")
    last = max((t for t, _ in presses), default=1)
    steps = steps if steps is not None else last + 2
    columns = {s: _decay([presses.get((t, s), False) for t in range(1, steps + 1)]) for s in sensors}
    background = _level_relation()
    states = [background | {atom('v', s, LEVELS[columns[s][t]]) for s in sensors} for t in range(steps)]
    sig = TypeSignature.build(types=['sensor', 'level'],
                              objects={**{s: 'sensor' for s in sensors}, **{lv: 'level' for lv in LEVELS}},
                              predicates={'v': ['sensor', 'level'], 'lower': ['level', 'level']})
    task = ApperceptionTask(name=name, seq=_sequence(states), base_sig=sig,
                            given_constraints=(exists_unique('v'), exists_unique('lower')))
    return hide_atoms(task, mode, count, seed, predicates=['v'])


# --- Multi-Modal Binding ---

def touch_levels(column: Sequence[int]) -> List[int]:
    """Touch reading for one cell column: 3 while the cell is on, else one lower than before, floor 0."""
    return _decay([bool(bit) for bit in column])


def make_binding_task(eca: EcaSpec, touch_cells: Sequence[int] = (3, 11), mode: str = PREDICT,
                      count: Optional[int] = None, seed: int = 0) -> MaskedTask:
    """Light sensors read black/white per cell; touch sensors attached to `touch_cells` read felt(t, level)."""
    bad = [c for c in touch_cells if not 1 <= c <= eca.width]
    if bad:
        raise InvalidInputError(f"touch cells {bad} are outside 1..{eca.width}")
    rows = eca_trajectory(eca)
    touches = {f"t{k}": touch_levels(rows[:, cell - 1]) for k, cell in enumerate(touch_cells, start=1)}
    background = _level_relation()
    states = []
    for step, row in enumerate(rows):
        state = {atom('black' if bit else 'white', cell_name(i)) for i, bit in enumerate(row, start=1)}
        state |= {atom('felt', toucher, LEVELS[levels[step]]) for toucher, levels in touches.items()}
        states.append(background | state)
    sig = TypeSignature.build(
        types=['light', 'touch', 'level'],
        objects={**{cell_name(i): 'light' for i in range(1, eca.width + 1)},
                 **{t: 'touch' for t in touches}, **{lv: 'level' for lv in LEVELS}},
        predicates={'black': ['light'], 'white': ['light'], 'felt': ['touch', 'level'],
                    'lower': ['level', 'level']},
    )
    task = ApperceptionTask(
        name=f"binding{eca.rule_number}_w{eca.width}", seq=_sequence(states), base_sig=sig,
        given_constraints=(xor_unary('light', ['black', 'white']), exists_unique('felt'), exists_unique('lower')),
    )
    return hide_atoms(task, mode, count, seed, predicates=['black', 'white', 'felt'])


# --- Occlusion ---

def eye_name(column: int) -> str:
    return f"e{column}"


def mover_positions(width: int, movers: Sequence[Tuple[int, int, int]], steps: int) -> np.ndarray:
    """(steps, movers) array of 1-based columns; movers wrap around at the edges."""
    starts = np.array([col - 1 for _, col, _ in movers], dtype=int)
    velocities = np.array([v for _, _, v in movers], dtype=int)
    offsets = np.arange(steps).reshape(-1, 1) * velocities
    return (starts + offsets) % width + 1


def make_occlusion_task(width: int, height: int, movers: Sequence[Tuple[int, int, int]], steps: int = 10,
                        name: str = 'occlusion') -> MaskedTask:
    """Movers (row, start column, velocity) pass over a row of eyes, row 1 nearest.

    Each step, the eye under column c sees the mover in the nearest row of c
    and misses every other mover. Movers' columns are observed while they are
    seen by some eye; the columns of occluded movers are the hidden atoms.
    """
    rows = [row for row, _, _ in movers]
    if len(set(rows)) != len(rows):
        raise InvalidInputError("two movers share a row")
    for row, col, _ in movers:
        if not 1 <= row <= height or not 1 <= col <= width:
            raise InvalidInputError(f"mover at row {row}, column {col} is outside the {width}x{height} grid")
    names = [f"m{k}" for k in range(1, len(movers) + 1)]
    positions = mover_positions(width, movers, steps)
    full, hidden = [], set()
    for t in range(steps):
        state = {atom('next_col', eye_name(c), eye_name(c % width + 1)) for c in range(1, width + 1)}
        nearest: Dict[int, int] = {}
        for k in sorted(range(len(names)), key=lambda j: rows[j], reverse=True):
            nearest[int(positions[t, k])] = k
        for c in range(1, width + 1):
            for k, name_k in enumerate(names):
                state.add(atom('sees' if nearest.get(c) == k else 'misses', eye_name(c), name_k))
        for k, name_k in enumerate(names):
            col = int(positions[t, k])
            at = atom('at', name_k, eye_name(col))
            state.add(at)
            if nearest[col] != k:
                hidden.add((t + 1, at))
        full.append(frozenset(state))
    sig = TypeSignature.build(
        types=['eye', 'mover'],
        objects={**{eye_name(c): 'eye' for c in range(1, width + 1)}, **{n: 'mover' for n in names}},
        predicates={'at': ['mover', 'eye'], 'sees': ['eye', 'mover'], 'misses': ['eye', 'mover'],
                    'next_col': ['eye', 'eye']},
    )
    visible = [state - {a for s, a in hidden if s == t} for t, state in enumerate(full, start=1)]
    task = ApperceptionTask(
        name=name, seq=_sequence(visible), base_sig=sig,
        given_constraints=(exists_unique('at'), xor_binary('eye', 'mover', ['misses', 'sees']),
                           exists_unique('next_col')),
    )
    return MaskedTask(task=task, hidden=frozenset(hidden), mode=IMPUTE)


# --- Task Files ---

def write_task(masked: MaskedTask) -> str:
    task = masked.task
    lines = ['TASK', f"name {task.name}", f"mode {masked.mode}", f"horizon {len(task.seq)}"]
    lines += ['SIGNATURE'] + format_signature_lines(task.base_sig)
    lines += ['CONSTRAINTS'] + [str(c) for c in task.given_constraints]
    lines.append('STATES')
    for t, state in enumerate(task.seq.states, start=1):
        lines += [f"{t} {a}" for a in sorted(state)]
    lines.append('HIDDEN')
    lines += [f"{t} {a}" for t, a in sorted(masked.hidden)]
    return '\n'.join(lines) + '\n'


def _timed_atoms(lines: Iterable[Tuple[int, str]], horizon: int) -> List[HiddenAtom]:
    found: List[HiddenAtom] = []
    for number, line in lines:
        head, _, rest = line.partition(' ')
        if not head.isdigit() or not rest.strip():
            raise InvalidInputError(f"line {number}: expected '<time> <atom>', got {line!r}")
        t = int(head)
        if not 1 <= t <= horizon:
            raise InvalidInputError(f"line {number}: time {t} is outside 1..{horizon}")
        found.append((t, parse_atom(rest.strip())))
    return found


def read_task(text: str) -> MaskedTask:
    sections = split_sections(text, TASK_SECTIONS)
    for required in ('TASK', 'SIGNATURE'):
        if required not in sections:
            raise InvalidInputError(f"task file has no {required} section")
    meta: Dict[str, str] = {}
    for number, line in sections['TASK']:
        key, _, value = line.partition(' ')
        if key not in ('name', 'mode', 'horizon') or not value.strip():
            raise InvalidInputError(f"line {number}: cannot read task entry {line!r}")
        meta[key] = value.strip()
    if not meta.get('horizon', '').isdigit() or int(meta['horizon']) < 1:
        raise InvalidInputError("task file needs a positive horizon")
    horizon = int(meta['horizon'])
    sig = parse_signature_lines(sections['SIGNATURE'])
    constraints = tuple(parse_constraint(line, n) for n, line in sections.get('CONSTRAINTS', []))
    states: List[set] = [set() for _ in range(horizon)]
    for t, item in _timed_atoms(sections.get('STATES', []), horizon):
        states[t - 1].add(item)
    hidden = frozenset(_timed_atoms(sections.get('HIDDEN', []), horizon))
    task = ApperceptionTask(name=meta.get('name', 'task'), seq=_sequence(states), base_sig=sig,
                            given_constraints=constraints)
    try:
        return MaskedTask(task=task, hidden=hidden, mode=meta.get('mode', PREDICT))
    except ValueError as e:
        raise InvalidInputError(f"invalid task file: {e}") from e
