"""
catalog.py

Worked examples: the two-sensor running example with its prediction,
retrodiction and imputation masks, three hand-written theories that make sense
of it, the first theory the anytime search reports for it, the alternating
single-sensor sequence, the letter-sequence benchmarks and their noisy
variants.
"""

# --- Standard Library Imports ---
from typing import Dict, List

# --- Local Imports ---
from .formats import parse_theory
from .logic import SensorySequence, Theory, TypeSignature, atom, xor_unary
from .problem import ApperceptionTask
from .tasks import IMPUTE, PREDICT, RETRODICT, MaskedTask, flip_symbols, load_sequence_task, repeat_pattern

# --- Running Example ---

RUNNING_STATES = (
    (),
    (atom('off', 'a'), atom('on', 'b')),
    (atom('on', 'a'), atom('off', 'b')),
    (atom('on', 'a'), atom('on', 'b')),
    (atom('on', 'b'),),
    (atom('on', 'a'), atom('off', 'b')),
    (atom('on', 'a'), atom('on', 'b')),
    (atom('off', 'a'), atom('on', 'b')),
    (atom('on', 'a'),),
    (),
)

# S'_1..S'_30: the running example continued with the same three-step cycle.
_CYCLE = ((atom('off', 'a'), atom('on', 'b')), (atom('on', 'a'), atom('off', 'b')), (atom('on', 'a'), atom('on', 'b')))
LONG_NOISE_STATES = RUNNING_STATES + tuple(_CYCLE[i % 3] for i in range(19)) + ((),)


def running_signature() -> TypeSignature:
    return TypeSignature.build(types=['sensor'], objects={'a': 'sensor', 'b': 'sensor'},
                               predicates={'on': ['sensor'], 'off': ['sensor']})


def running_task(states=RUNNING_STATES, name: str = 'running') -> ApperceptionTask:
    return ApperceptionTask(name=name, seq=SensorySequence.of(states), base_sig=running_signature(),
                            given_constraints=(xor_unary('sensor', ['on', 'off']),))


def running_masks() -> Dict[str, MaskedTask]:
    """Prediction at t=10, retrodiction at t=1, imputation at t=5 and t=9."""
    task = running_task()
    return {
        PREDICT: MaskedTask(task=task, mode=PREDICT,
                            hidden=frozenset({(10, atom('on', 'a')), (10, atom('on', 'b'))})),
        RETRODICT: MaskedTask(task=task, mode=RETRODICT,
                              hidden=frozenset({(1, atom('on', 'a')), (1, atom('on', 'b'))})),
        IMPUTE: MaskedTask(task=task, mode=IMPUTE,
                           hidden=frozenset({(5, atom('off', 'a')), (9, atom('off', 'b'))})),
    }


OUTLIER_STEP = 4


def _flip_reading(states, t: int, sensor: str):
    flipped = {atom('on', sensor): atom('off', sensor), atom('off', sensor): atom('on', sensor)}
    out = list(states)
    out[t - 1] = tuple(flipped.get(a, a) for a in out[t - 1])
    return tuple(out)


def noise_task(long: bool = False, outlier: bool = False) -> ApperceptionTask:
    """S_1..S_10, or the 30-step continuation; `outlier` flips sensor a's reading at t=4."""
    states = LONG_NOISE_STATES if long else RUNNING_STATES
    name = 'noise30' if long else 'noise10'
    if outlier:
        states = _flip_reading(states, OUTLIER_STEP, 'a')
        name += '_outlier'
    return running_task(states, name=name)


# --- Worked Theories ---

_RUNNING_SIGNATURE = """\
SIGNATURE
type sensor
object a: sensor
object b: sensor
predicate on(sensor)
predicate off(sensor)
"""

# Two state machines cycling p1 -> p2 -> p3, on in p1 and p2.
STATE_MACHINE_THEORY = _RUNNING_SIGNATURE + """\
predicate p1(sensor)
predicate p2(sensor)
predicate p3(sensor)
predicate r(sensor,sensor)
variable X: sensor
variable Y: sensor
INIT
p1(b)
p2(a)
r(a,b)
r(b,a)
RULES
p1(X) >> p2(X)
p2(X) >> p3(X)
p3(X) >> p1(X)
p1(X) -> on(X)
p2(X) -> on(X)
p3(X) -> off(X)
CONSTRAINTS
xor sensor: on,off
xor sensor: p1,p2,p3
unique r
"""

# A three-cell ring with an unobserved cell c; each cell copies its left neighbour.
HIDDEN_CELL_THEORY = _RUNNING_SIGNATURE + """\
object c: sensor
predicate r(sensor,sensor)
variable X: sensor
variable Y: sensor
INIT
on(a)
on(b)
off(c)
r(a,b)
r(b,c)
r(c,a)
RULES
off(X), r(X,Y) >> off(Y)
on(X), r(X,Y) >> on(Y)
CONSTRAINTS
xor sensor: on,off
unique r
"""

# Sensors move right to left over three fixed black / white cells.
MOVING_SENSOR_THEORY = _RUNNING_SIGNATURE + """\
type cell
object c1: cell
object c2: cell
object c3: cell
predicate part(sensor,cell)
predicate r(cell,cell)
predicate black(cell)
predicate white(cell)
variable X: sensor
variable Y: cell
variable Y2: cell
INIT
part(a,c1)
part(b,c2)
r(c1,c2)
r(c2,c3)
r(c3,c1)
black(c1)
black(c2)
white(c3)
RULES
black(Y), part(X,Y) -> on(X)
part(X,Y), white(Y) -> off(X)
part(X,Y2), r(Y,Y2) >> part(X,Y)
CONSTRAINTS
xor sensor: on,off
xor cell: black,white
unique part
unique r
"""

# Two-state machine over a grid object, the first theory the search reports.
GRID_THEORY = _RUNNING_SIGNATURE + """\
type grid
object g: grid
predicate p1(sensor)
predicate p2(sensor)
predicate part(sensor,grid)
variable S: sensor
variable S2: sensor
INIT
p1(a)
p2(b)
on(a)
part(a,g)
part(b,g)
RULES
p2(S) -> on(S)
p2(S) >> p1(S)
on(S), p1(S) >> off(S)
off(S), p1(S) >> p2(S)
CONSTRAINTS
xor sensor: on,off
xor sensor: p1,p2
unique part
"""


def worked_theories() -> Dict[str, Theory]:
    return {
        'state_machine': parse_theory(STATE_MACHINE_THEORY),
        'hidden_cell': parse_theory(HIDDEN_CELL_THEORY),
        'moving_sensor': parse_theory(MOVING_SENSOR_THEORY),
        'grid': parse_theory(GRID_THEORY),
    }


# --- Alternating Sensor ---

def alternating_task(steps: int = 7) -> ApperceptionTask:
    """One sensor a reading on, off, on, ... for `steps` steps."""
    sig = TypeSignature.build(types=['t'], objects={'a': 't'}, predicates={'on': ['t'], 'off': ['t']})
    states = [(atom('on' if i % 2 == 0 else 'off', 'a'),) for i in range(steps)]
    return ApperceptionTask(name=f"alternating{steps}", seq=SensorySequence.of(states), base_sig=sig,
                            given_constraints=(xor_unary('t', ['on', 'off']),))


# --- Letter Sequences ---

THEME_SONG = 'babbbbbcbbdbbeb'

SEEK_WHENCE_EXAMPLES = ('bbbccbbbccbbbcc', 'afbffcfffdff', THEME_SONG)

SEEK_WHENCE_BENCHMARK = (
    'aababcabcda', 'abcde',
    'babbbbbcbbdbbe', 'abbcccddddde',
    'afefafefafefa', 'babbbcbdbe',
    'abbccddee', 'abccddeeefff',
    'fafbfcfdf', 'afeefaafeefaa',
    'bbbccbbbccbbbcc', 'baabbbaaaabbbbb',
    'bcacacbdbdbcaca', 'abbccddeeff',
    'aababcabcdabcde', 'bacabdabceabcdf',
    'abacbadcbaedcb', 'cbabcbabcbabcb',
    'aaabbceff', 'aabaabcbaabcdcb',
    'aabcabbcabccaaa', 'ababababa',
    'acbdced', 'acfbead',
    'aaffeedd', 'aaabbbcc',
    'aabbfabbeabbd', 'fadabafadaba',
    'abafaaefa', 'bafbaebad',
)

NOISE_PATTERNS = ('ab', 'aab', 'aabb', 'aaab', 'abba', 'abc', 'abcba', 'abac', 'abcc', 'aabbcc')


def pattern_task(pattern: str, length: int = 10, name: str = '') -> MaskedTask:
    """`pattern` repeated to `length` + 1 symbols; the last one is hidden."""
    return load_sequence_task(repeat_pattern(pattern, length + 1), name=name or f"{pattern}_{length}")


def benchmark_tasks() -> List[MaskedTask]:
    return [load_sequence_task(seq, name=f"seek{i:02d}") for i, seq in enumerate(SEEK_WHENCE_BENCHMARK, start=1)]


def noisy_pattern_task(pattern: str, length: int = 100, fraction: float = 0.3, seed: int = 0) -> MaskedTask:
    """Like pattern_task, with `fraction` of the visible letters flipped; the hidden letter stays true."""
    symbols = repeat_pattern(pattern, length + 1)
    alphabet = sorted(set(pattern))
    visible = flip_symbols(symbols[:-1], fraction, seed=seed, alphabet=alphabet)
    return load_sequence_task(visible + symbols[-1:], value_alphabet=alphabet,
                              name=f"{pattern}_{length}_noisy{seed}")
