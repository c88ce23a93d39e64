import pytest
from pydantic import ValidationError

from apperception.catalog import alternating_task, running_signature
from apperception.errors import InvalidInputError
from apperception.evaluation import (
    CONSTANT, INERTIA, EvalResult, SuiteSummary, baseline_constant, baseline_inertia, evaluate_baseline,
    evaluate_task, input_bits, results_table, run_suite, strict_accuracy, summarize,
)
from apperception.logic import SensorySequence, Theory, atom, xor_unary
from apperception.problem import ApperceptionTask, SearchBudget
from apperception.tasks import (
    IMPUTE, MODES, PREDICT, RETRODICT, EcaSpec, MaskedTask, eca_trajectory, hide_atoms, make_eca_task,
)


def eca(rule_number):
    return make_eca_task(EcaSpec(rule_number=rule_number, width=11, steps=10))


@pytest.mark.parametrize('mode', MODES)
def test_state_machine_is_accurate_on_every_mask(state_machine, masks, mode):
    accurate, detail = strict_accuracy(state_machine, masks[mode])
    assert accurate
    assert len(detail) == 2


def test_a_wrong_guess_is_a_miss(state_machine, running):
    masked = MaskedTask(task=running, mode=IMPUTE, hidden=frozenset({(5, atom('on', 'a')), (9, atom('off', 'b'))}))
    accurate, detail = strict_accuracy(state_machine, masked)
    assert not accurate
    assert detail == [(5, atom('on', 'a'), False), (9, atom('off', 'b'), True)]


def test_no_hidden_atoms_is_vacuously_accurate(state_machine, running):
    assert strict_accuracy(state_machine, MaskedTask(task=running, mode=IMPUTE)) == (True, [])


def test_a_hedged_prediction_is_a_miss(masks):
    # without constraints the theory can hold on(a) and off(a) at once
    hedging = Theory(signature=running_signature(),
                     inits=frozenset({atom('on', 'a'), atom('off', 'a'), atom('on', 'b')}))
    accurate, detail = strict_accuracy(hedging, masks[RETRODICT])
    assert not accurate
    assert detail == [(1, atom('on', 'a'), False), (1, atom('on', 'b'), True)]


def test_hidden_atoms_never_reach_the_solver(masks):
    for masked in masks.values():
        assert all(item not in masked.task.seq.state(t) for t, item in masked.hidden)
        assert masked.full_sequence().atom_count() == masked.task.seq.atom_count() + len(masked.hidden)


def test_constant_baseline_takes_the_majority(masks):
    predictions, accurate, _ = baseline_constant(masks[PREDICT])
    assert predictions == {(10, atom('on', 'a')), (10, atom('on', 'b'))}
    assert accurate


def test_constant_baseline_breaks_ties_canonically():
    masked = hide_atoms(alternating_task(3), PREDICT)
    predictions, accurate, _ = baseline_constant(masked)
    assert predictions == {(3, atom('off', 'a'))}
    assert not accurate


def test_inertia_baseline_by_mode(masks):
    predictions, accurate, _ = baseline_inertia(masks[PREDICT])
    assert predictions == {(10, atom('on', 'a')), (10, atom('on', 'b'))}
    assert accurate
    _, accurate, detail = baseline_inertia(masks[RETRODICT])
    assert detail == [(1, atom('on', 'a'), False), (1, atom('on', 'b'), True)]
    predictions, accurate, _ = baseline_inertia(masks[IMPUTE])
    assert predictions == {(5, atom('on', 'a')), (9, atom('on', 'b'))}
    assert not accurate


def test_inertia_needs_a_visible_neighbour():
    masked = hide_atoms(alternating_task(1), PREDICT)
    with pytest.raises(InvalidInputError, match='no visible neighbour'):
        baseline_inertia(masked)
    result = evaluate_baseline(masked, INERTIA)
    assert not result.solved
    assert 'no visible neighbour' in result.error


@pytest.mark.parametrize('rule_number, expected', [(204, True), (110, False)])
def test_inertia_on_automata(rule_number, expected):
    _, accurate, _ = baseline_inertia(eca(rule_number))
    assert accurate is expected


def test_inertia_is_accurate_exactly_when_the_last_row_repeats():
    for rule_number in range(256):
        rows = eca_trajectory(EcaSpec(rule_number=rule_number, width=11, steps=10))
        _, accurate, _ = baseline_inertia(eca(rule_number))
        assert accurate == (rows[9].tolist() == rows[8].tolist()), rule_number


def test_unknown_baseline():
    with pytest.raises(InvalidInputError, match='unknown baseline'):
        evaluate_baseline(eca(204), 'oracle')


def test_input_bits(masks, onoff_sig):
    assert input_bits(masks[PREDICT]) == pytest.approx(14.0)
    assert input_bits(eca(110)) == pytest.approx(99.0)
    three_way = hide_atoms(ApperceptionTask(seq=SensorySequence.of([[atom('on', 'a')], [atom('mid', 'a')]]),
                                            base_sig=onoff_sig,
                                            given_constraints=(xor_unary('t', ['on', 'off', 'mid']),)), PREDICT)
    assert input_bits(three_way) == pytest.approx(1.585, abs=1e-3)


def test_evaluate_task_on_a_persistent_reading(make_onoff_task, quick_budget):
    masked = hide_atoms(make_onoff_task(['on', 'on']), PREDICT)
    result = evaluate_task(masked, quick_budget)
    assert result.solved and result.accurate
    assert (result.hits, result.misses, result.cost) == (1, 0, 1)
    assert result.log


def test_evaluate_task_reports_failures(onoff_sig):
    task = ApperceptionTask(seq=SensorySequence.of([[atom('on', 'a'), atom('off', 'a')], [atom('on', 'a')]]),
                            base_sig=onoff_sig, given_constraints=(xor_unary('t', ['on', 'off', 'mid']),))
    result = evaluate_task(hide_atoms(task, PREDICT))
    assert not result.solved
    assert 'cannot be extended' in result.error


def test_accurate_implies_solved():
    with pytest.raises(ValidationError):
        EvalResult(task='x', mode=PREDICT, accurate=True)


def test_run_suite_keeps_task_order():
    results, summary = run_suite([eca(204), eca(110)], workers=2, baseline=INERTIA)
    assert [r.task for r in results] == ['eca204_w11', 'eca110_w11']
    assert [r.accurate for r in results] == [True, False]
    assert (summary.tasks, summary.solved, summary.accurate) == (2, 2, 1)
    assert summary.percent_accurate == pytest.approx(50.0)
    assert summary.mean_bits == pytest.approx(99.0)


def test_run_suite_on_nothing():
    assert run_suite([]) == ([], SuiteSummary())
    assert summarize([]) == SuiteSummary()


def test_results_table():
    results, _ = run_suite([eca(204)], workers=1, baseline=CONSTANT)
    lines = results_table(results).splitlines()
    assert lines[0] == 'task,mode,solved,accurate,cost,seconds'
    assert lines[1].startswith('eca204_w11,predict,yes,')
    assert len(lines) == 2


@pytest.mark.slow
def test_solver_predicts_the_alternating_sensor():
    masked = hide_atoms(alternating_task(6), PREDICT)
    result = evaluate_task(masked, SearchBudget(seconds=600))
    assert result.accurate
    assert result.cost == 5
