import re
import time

import numpy as np
import pytest

from apperception.catalog import alternating_task, running_task
from apperception.degenerate import (
    WORLD_OBJECT, WORLD_TYPE, absent_partner, build_degenerate_theory, clock_predicate, part_predicate,
)
from apperception.logic import (
    Atom, SensorySequence, TypeSignature, atom, causal_rule, cost, exists_unique, static_rule, xor_binary, xor_unary,
)
from apperception.problem import ApperceptionTask
from apperception.trace import covers, detect_period
from apperception.unity import check_unity

X = 'gen_x_t'


def test_alternating_sensor_structure():
    theory = build_degenerate_theory(alternating_task(7))
    clocks = [name for name, _ in theory.signature.predicates if re.fullmatch(r'gen_p\d+_\d+', name)]
    assert sorted(clocks) == sorted(clock_predicate(1, j) for j in range(1, 8))
    assert (WORLD_OBJECT, WORLD_TYPE) in theory.signature.objects
    assert causal_rule([Atom('gen_p1_1', (X,))], Atom('gen_p1_2', (X,))) in theory.rules
    assert static_rule([Atom('gen_p1_1', (X,))], Atom('on', (X,))) in theory.rules
    assert static_rule([Atom('gen_p1_2', (X,))], Atom('off', (X,))) in theory.rules
    assert len(theory.causal_rules) == 6 and len(theory.static_rules) == 7
    assert theory.inits == {atom('gen_p1_1', 'a'), atom(part_predicate('t'), 'a', WORLD_OBJECT)}
    assert exists_unique(part_predicate('t')) in theory.constraints
    assert cost(theory) == 2 + 6 * 2 + 7 * 2


def test_alternating_sensor_theory_makes_sense():
    task = alternating_task(7)
    theory = build_degenerate_theory(task)
    trace = detect_period(theory)
    assert covers(task.seq, trace)
    assert check_unity(theory, trace).unified


def test_single_step_gets_an_idle_companion():
    theory = build_degenerate_theory(alternating_task(1))
    assert theory.causal_rules == ()
    assert xor_unary('t', [clock_predicate(1, 1), 'gen_idle_t']) in theory.constraints
    assert check_unity(theory).unified


def test_running_example_bound(running):
    theory = build_degenerate_theory(running)
    assert covers(running.seq, detect_period(theory))
    assert check_unity(theory).unified
    # 20 clocks for two sensors; part atoms; 18 causal rules; one static rule per filled atom.
    assert cost(theory) == 4 + 18 * 2 + 20 * 2


def random_task(rng, index):
    n_objects = int(rng.integers(1, 4))
    values = ['v1', 'v2', 'v3'][:int(rng.integers(2, 4))]
    steps = int(rng.integers(1, 7))
    objects = [f"o{i}" for i in range(1, n_objects + 1)]
    sig = TypeSignature.build(types=['t'], objects={o: 't' for o in objects}, predicates={v: ['t'] for v in values})
    states = []
    for _ in range(steps):
        state = set()
        for o in objects:
            if rng.random() < 0.7:
                state.add(atom(values[int(rng.integers(len(values)))], o))
        states.append(state)
    return ApperceptionTask(name=f"random{index}", seq=SensorySequence.of(states), base_sig=sig,
                            given_constraints=(xor_unary('t', values),))


def test_random_tasks_always_cover_and_unify():
    rng = np.random.default_rng(7)
    started = time.monotonic()
    for index in range(50):
        task = random_task(rng, index)
        theory = build_degenerate_theory(task)
        trace = detect_period(theory)
        assert covers(task.seq, trace), task.name
        report = check_unity(theory, trace)
        assert report.unified, f"{task.name}: {report.render()}"
    assert time.monotonic() - started < 10


def test_binary_observations_become_two_clock_rules():
    sig = TypeSignature.build(types=['s'], objects={'a': 's', 'b': 's'},
                              predicates={'on': ['s'], 'off': ['s'], 'r': ['s', 's']})
    seq = SensorySequence.of([[atom('on', 'a'), atom('off', 'b'), atom('r', 'a', 'b'), atom('r', 'b', 'a')]])
    task = ApperceptionTask(seq=seq, base_sig=sig, given_constraints=(xor_unary('s', ['on', 'off']), exists_unique('r')))
    theory = build_degenerate_theory(task)
    body = [Atom('gen_p1_1', ('gen_x_s',)), Atom('gen_p2_1', ('gen_y_s',))]
    assert static_rule(body, Atom('r', ('gen_x_s', 'gen_y_s'))) in theory.rules
    assert covers(seq, detect_period(theory))
    assert check_unity(theory).unified


@pytest.mark.parametrize('steps', [2, 5])
def test_clock_stops_on_the_last_step(steps):
    theory = build_degenerate_theory(alternating_task(steps))
    trace = detect_period(theory)
    assert trace.period_start == steps and trace.period_length == 1


def test_part_predicates_are_not_clocks():
    assert part_predicate('t') == 'gen_in_t'
    assert not re.fullmatch(r'gen_p\d+_\d+', part_predicate('t'))


def test_unused_predicates_are_held_false():
    sig = TypeSignature.build(types=['t'], objects={'a': 't', 'b': 't'},
                              predicates={'on': ['t'], 'off': ['t'], 'lit': ['t'], 'near': ['t', 't']})
    seq = SensorySequence.of([[atom('on', 'a'), atom('off', 'b')], [atom('off', 'a')]])
    task = ApperceptionTask(name='spare', seq=seq, base_sig=sig, given_constraints=(xor_unary('t', ['on', 'off']),))
    theory = build_degenerate_theory(task)
    assert xor_unary('t', ['lit', absent_partner('lit')]) in theory.constraints
    assert xor_binary('t', 't', ['near', absent_partner('near')]) in theory.constraints
    assert {atom(absent_partner('lit'), 'a'), atom(absent_partner('near'), 'b', 'a')} <= theory.inits
    trace = detect_period(theory)
    assert covers(seq, trace)
    assert not any(a.pred in ('lit', 'near') for state in trace.prefix for a in state)
    report = check_unity(theory, trace)
    assert report.unified, report.render()
