import re

import pytest

from apperception.catalog import running_signature
from apperception.formats import format_theory, parse_theory
from apperception.logic import Theory, atom, constraint_instances, exists_unique, violated_instance, xor_unary
from apperception.trace import detect_period, evaluate_flagged
from apperception.unity import check_conceptual, check_unity, disconnected_pair


@pytest.mark.parametrize('name', ['state_machine', 'hidden_cell', 'moving_sensor', 'grid'])
def test_worked_theories_are_unified(theories, name):
    report = check_unity(theories[name])
    assert report.unified, report.render()


def test_dropped_relation_breaks_only_spatial_unity(state_machine):
    sig = state_machine.signature
    mutant = Theory(
        signature=sig.model_copy(update={'predicates': tuple(p for p in sig.predicates if p[0] != 'r')}),
        inits=frozenset(a for a in state_machine.inits if a.pred != 'r'),
        rules=state_machine.rules,
        constraints=tuple(c for c in state_machine.constraints if c != exists_unique('r')),
    )
    report = check_unity(mutant)
    assert report.spatial.detail == 't=1: a not connected to b'
    assert report.conceptual.passed and report.static.passed and report.temporal.passed


def test_dropped_constraint_breaks_only_conceptual_unity(hidden_cell):
    mutant = hidden_cell.model_copy(update={
        'constraints': tuple(c for c in hidden_cell.constraints if c != exists_unique('r')),
    })
    report = check_unity(mutant)
    assert report.conceptual.detail == 'predicate r is in no constraint'
    assert report.spatial.passed and report.static.passed and report.temporal.passed


def test_corrupted_trace_breaks_only_static_unity(state_machine):
    trace = detect_period(state_machine)
    prefix = list(trace.prefix)
    prefix[1] = prefix[1] | {atom('on', 'a')}
    corrupted = trace.model_copy(update={'prefix': tuple(prefix)})
    report = check_unity(state_machine, corrupted)
    assert not report.static.passed
    assert report.static.detail.startswith('t=2:')
    assert report.spatial.passed and report.conceptual.passed and report.temporal.passed


def test_trace_missing_a_caused_atom_breaks_temporal_unity(state_machine):
    trace = detect_period(state_machine)
    prefix = list(trace.prefix)
    prefix[1] = prefix[1] - {atom('p3', 'a')}
    report = check_unity(state_machine, trace.model_copy(update={'prefix': tuple(prefix)}))
    assert not report.temporal.passed
    assert 'p3(a)' in report.temporal.detail


def test_render_lists_every_condition(state_machine):
    lines = check_unity(state_machine).render().splitlines()
    assert lines == ['spatial: pass', 'conceptual: pass', 'static: pass', 'temporal: pass']


def test_unclosed_state_breaks_static_unity(theories):
    moving = theories['moving_sensor']
    trace = detect_period(moving)
    prefix = list(trace.prefix)
    prefix[0] = prefix[0] - {atom('on', 'a')} | {atom('off', 'a')}
    report = check_unity(moving, trace.model_copy(update={'prefix': tuple(prefix)}))
    assert not report.static.passed
    assert 'missing on(a)' in report.static.detail


def test_single_object_is_connected():
    assert disconnected_pair(['a'], []) is None
    assert disconnected_pair(['a', 'b', 'c'], [atom('r', 'a', 'b')]) == ('a', 'c')
    assert disconnected_pair(['a', 'b', 'c'], [atom('r', 'a', 'b'), atom('r', 'c', 'b')]) is None


def test_empty_theory_conceptual_check():
    sig = running_signature()
    assert not check_conceptual(Theory(signature=sig))
    assert check_conceptual(Theory(signature=sig, constraints=(xor_unary('sensor', ['on', 'off']),)))


def test_checks_over_one_period_agree_with_a_longer_run(random_theories):
    for theory in random_theories:
        trace = detect_period(theory)
        horizon = trace.period_start + 3 * trace.period_length
        states, flags = evaluate_flagged(theory, horizon)
        instances = constraint_instances(theory.signature, theory.constraints)
        objects = [name for name, _ in theory.signature.objects]
        report = check_unity(theory, trace)
        consistent = not any(flags) and all(violated_instance(s, instances) is None for s in states)
        assert report.static.passed == consistent, report.render()
        assert report.spatial.passed == all(disconnected_pair(objects, s) is None for s in states)


RENAMES = {'a': 'left', 'b': 'right', 'on': 'lit', 'off': 'dark', 'r': 'beside', 'sensor': 'eye', 'p1': 'phase1'}


def renamed(theory):
    text = format_theory(theory)
    return parse_theory(re.sub(r'\b\w+\b', lambda m: RENAMES.get(m.group(0), m.group(0)), text))


@pytest.mark.parametrize('name', ['state_machine', 'hidden_cell', 'moving_sensor', 'grid'])
def test_unity_ignores_names(theories, name):
    theory = theories[name]
    twin = renamed(theory)
    assert twin != theory
    assert check_unity(twin).render() == check_unity(theory).render()


def test_unity_failures_survive_renaming(hidden_cell):
    mutant = hidden_cell.model_copy(update={
        'constraints': tuple(c for c in hidden_cell.constraints if c != exists_unique('r')),
    })
    report = check_unity(renamed(mutant))
    assert report.conceptual.detail == 'predicate beside is in no constraint'
