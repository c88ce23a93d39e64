import logging

import numpy as np
import pytest

from apperception.catalog import running_masks, running_task, worked_theories
from apperception.logic import (
    SensorySequence, Theory, TypeSignature, atom, causal_rule, exists_unique, static_rule, xor_unary,
)
from apperception.problem import ApperceptionTask, SearchBudget


@pytest.fixture
def theories():
    return worked_theories()


@pytest.fixture
def state_machine(theories):
    return theories['state_machine']


@pytest.fixture
def hidden_cell(theories):
    return theories['hidden_cell']


@pytest.fixture
def running():
    return running_task()


@pytest.fixture
def masks():
    return running_masks()


@pytest.fixture
def onoff_sig():
    """One sensor `a` reading on/off, with a spare `mid` value."""
    return TypeSignature.build(types=['t'], objects={'a': 't'},
                               predicates={'on': ['t'], 'off': ['t'], 'mid': ['t']})


@pytest.fixture
def make_onoff_task(onoff_sig):
    def build(readings, name='micro'):
        states = [() if r is None else (atom(r, 'a'),) for r in readings]
        return ApperceptionTask(name=name, seq=SensorySequence.of(states), base_sig=onoff_sig,
                                given_constraints=(xor_unary('t', ['on', 'off', 'mid']),))
    return build


def random_theory(rng, causal=True):
    """Two objects, twelve ground atoms, up to three random rules."""
    sig = TypeSignature.build(types=['t'], objects={'a': 't', 'b': 't'},
                              predicates={'p': ['t'], 'q': ['t'], 'lit': ['t'], 'dark': ['t'], 'r': ['t', 't']},
                              variables={'X': 't', 'Y': 't'})
    unary = ['p', 'q', 'lit', 'dark']

    def pick(options):
        return options[int(rng.integers(len(options)))]

    rules = []
    for _ in range(int(rng.integers(1, 4))):
        shape = int(rng.integers(3))
        if shape == 0:
            body = [atom(pick(unary), 'X')]
        elif shape == 1:
            body = [atom(pick(unary), 'X'), atom(pick(unary), 'X')]
        else:
            body = [atom('r', 'X', 'Y'), atom(pick(unary), 'Y')]
        build = causal_rule if causal and rng.random() < 0.6 else static_rule
        rules.append(build(body, atom(pick(unary), 'X')))
    inits = {atom(pick(['p', 'q']), o) for o in 'ab'} | {atom(pick(['lit', 'dark']), o) for o in 'ab'}
    inits |= {atom('r', 'a', pick(['a', 'b'])), atom('r', 'b', pick(['a', 'b']))}
    return Theory(signature=sig, inits=frozenset(inits), rules=tuple(rules),
                  constraints=(xor_unary('t', ['p', 'q']), xor_unary('t', ['lit', 'dark']), exists_unique('r')))


@pytest.fixture
def random_theories():
    rng = np.random.default_rng(19)
    return [random_theory(rng) for _ in range(60)]


@pytest.fixture
def static_only_theories():
    rng = np.random.default_rng(23)
    return [random_theory(rng, causal=False) for _ in range(40)]


@pytest.fixture
def quick_budget():
    return SearchBudget(seconds=30, template_limit=10)


@pytest.fixture(autouse=True)
def fresh_log_handlers():
    """The CLI binds its handler to the current stderr, which capsys swaps per test."""
    yield
    logger = logging.getLogger('apperception')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
