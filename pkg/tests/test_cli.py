import pytest

from apperception.catalog import alternating_task
from apperception.cli import EXIT_INVALID, EXIT_NO_THEORY, EXIT_OK, main
from apperception.degenerate import build_degenerate_theory
from apperception.formats import format_template, parse_theory
from apperception.logic import cost
from apperception.tasks import PREDICT, hide_atoms, read_task, write_task
from apperception.templates import Template


def write_masked(path, masked):
    path.write_text(write_task(masked))
    return path


def write_template(path, task, n_causal):
    tpl = Template(signature=task.base_sig.extend(variables={'X': 't'}), n_static=0, n_causal=n_causal, n_body=1)
    path.write_text(format_template(tpl))
    return path


def test_gen_task_writes_a_readable_file(tmp_path):
    out = tmp_path / 'tasks' / 'eca110.task'
    assert main(['gen-task', 'eca', '--rule', '110', '--width', '5', '--steps', '4', '--out', str(out)]) == EXIT_OK
    masked = read_task(out.read_text())
    assert masked.name == 'eca110_w5'
    assert len(masked.hidden) == 5


def test_gen_task_to_stdout(capsys):
    assert main(['gen-task', 'sequence', '--symbols', 'abab']) == EXIT_OK
    assert capsys.readouterr().out.startswith('TASK\nname sequence\n')


def test_solve_with_a_pinned_template(tmp_path, capsys, make_onoff_task):
    task = make_onoff_task(['on', 'on'])
    task_file = write_masked(tmp_path / 'micro.task', hide_atoms(task, PREDICT))
    tpl_file = write_template(tmp_path / 'one.template', task, n_causal=0)
    out = tmp_path / 'results'
    code = main(['solve', str(task_file), '--template', str(tpl_file), '--out', str(out)])
    assert code == EXIT_OK
    assert 'solved micro: cost 1' in capsys.readouterr().err
    theory = parse_theory((out / 'micro.theory').read_text())
    assert cost(theory) == 1
    assert (out / 'micro.trace').read_text().startswith('# period starts at 1, length 1\n')
    assert 'unified: yes' in (out / 'micro.unity').read_text()


def test_solve_reports_no_theory(tmp_path, capsys):
    task = alternating_task(4)
    task_file = write_masked(tmp_path / 'alt.task', hide_atoms(task, PREDICT))
    tpl_file = write_template(tmp_path / 'short.template', task, n_causal=1)
    assert main(['solve', str(task_file), '--template', str(tpl_file)]) == EXIT_NO_THEORY
    assert 'no theory for alternating4' in capsys.readouterr().err


def test_degenerate_theory_on_stdout(tmp_path, capsys):
    task = alternating_task(5)
    task_file = write_masked(tmp_path / 'alt.task', hide_atoms(task, PREDICT))
    assert main(['degenerate', str(task_file)]) == EXIT_OK
    theory = parse_theory(capsys.readouterr().out)
    expected = build_degenerate_theory(read_task(task_file.read_text()).task)
    assert cost(theory) == cost(expected)


def test_baseline_over_a_suite(tmp_path, capsys):
    suite = tmp_path / 'suite'
    for rule in ('204', '110'):
        assert main(['gen-task', 'eca', '--rule', rule, '--width', '5', '--steps', '4',
                     '--out', str(suite / f"eca{rule}.task")]) == EXIT_OK
    table = tmp_path / 'inertia.csv'
    assert main(['baseline', 'inertia', str(suite), '--out', str(table)]) == EXIT_OK
    rows = table.read_text().splitlines()
    assert rows[0] == 'task,mode,solved,accurate,cost,seconds'
    assert [r.split(',')[0] for r in rows[1:]] == ['eca110_w5', 'eca204_w5']
    assert rows[2].startswith('eca204_w5,predict,yes,yes')
    assert 'inertia: ' in capsys.readouterr().err


def test_eval_on_a_small_suite(tmp_path, capsys, make_onoff_task):
    suite = tmp_path / 'suite'
    suite.mkdir()
    write_masked(suite / 'micro.task', hide_atoms(make_onoff_task(['on', 'on']), PREDICT))
    code = main(['eval', str(suite), '--budget-secs', '30', '--template-limit', '5', '--workers', '1'])
    assert code == EXIT_OK
    captured = capsys.readouterr()
    assert captured.out.splitlines()[1].startswith('micro,predict,yes,yes,1,')
    assert 'tasks=1 solved=1 accurate=1' in captured.err


def test_eval_on_an_empty_suite(tmp_path, capsys):
    (tmp_path / 'empty').mkdir()
    assert main(['eval', str(tmp_path / 'empty')]) == EXIT_INVALID
    assert '[ERROR]' in capsys.readouterr().err


@pytest.mark.parametrize('argv', [
    ['solve'],
    ['gen-task', 'eca', '--rule', 'x'],
    ['gen-task', 'weather'],
    ['baseline', 'oracle', 'suite'],
    ['solve', 'x.task', '--ablate', 'everything'],
])
def test_bad_flags(argv):
    assert main(argv) == EXIT_INVALID


def test_invalid_inputs(tmp_path, capsys):
    assert main(['solve', str(tmp_path / 'missing.task')]) == EXIT_INVALID
    assert main(['gen-task', 'eca', '--rule', '300']) == EXIT_INVALID
    assert main(['gen-task', 'occlusion', '--mover', '1,1']) == EXIT_INVALID
    broken = tmp_path / 'broken.task'
    broken.write_text('TASK\nhorizon two\n')
    assert main(['solve', str(broken)]) == EXIT_INVALID
    assert capsys.readouterr().err.count('[ERROR]') >= 4
