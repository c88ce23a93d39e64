from fractions import Fraction

import pytest
from pydantic import ValidationError

from apperception.catalog import running_signature, running_task
from apperception.errors import InvalidInputError
from apperception.logic import (
    Atom, Exclusions, SensorySequence, Theory, TypeSignature, atom, causal_rule, completions, constraint_instances,
    cost, enumerate_atoms, exists_unique, incompossible, is_extendable, is_suitable, parse_atom, static_rule,
    validate_constraints, validate_signature, validate_theory, violated_instance, xor_unary,
)
from apperception.problem import ApperceptionTask, SolveOptions, check_task, task_violations


def grid_sig():
    return TypeSignature.build(types=['s'], objects={'a': 's', 'b': 's', 'c': 's'},
                               predicates={'on': ['s'], 'off': ['s'], 'r': ['s', 's']},
                               variables={'X': 's', 'Y': 's'})


@pytest.mark.parametrize('text, expected', [
    ('on(a)', atom('on', 'a')),
    ('r(a,b)', atom('r', 'a', 'b')),
    ('  r( a , b ) ', atom('r', 'a', 'b')),
])
def test_parse_atom(text, expected):
    assert parse_atom(text) == expected


@pytest.mark.parametrize('text', ['on', 'on()', 'p(a,b,c)', 'p(a b)', '1p(a)', 'p(-a)'])
def test_parse_atom_rejects(text):
    with pytest.raises(InvalidInputError):
        parse_atom(text)


def test_atoms_print_canonically():
    assert str(atom('r', 'a', 'b')) == 'r(a,b)'
    rule = static_rule([atom('p2', 'X'), atom('p1', 'X')], atom('on', 'X'))
    assert rule.body == (atom('p1', 'X'), atom('p2', 'X'))
    assert str(rule) == 'p1(X), p2(X) -> on(X)'
    assert str(causal_rule([atom('p1', 'X')], atom('p2', 'X'))) == 'p1(X) >> p2(X)'


@pytest.mark.parametrize('name, expected', [
    ('state_machine', 16),
    ('hidden_cell', 12),
    ('moving_sensor', 17),
    ('grid', 15),
])
def test_worked_theory_costs(theories, name, expected):
    assert cost(theories[name]) == expected


def test_cost_counts_inits_and_rule_sizes():
    sig = grid_sig()
    theory = Theory(signature=sig, inits=frozenset({atom('on', 'a')}),
                    rules=(causal_rule([atom('on', 'X'), atom('r', 'X', 'Y')], atom('on', 'Y')),))
    assert cost(theory) == 1 + 3
    assert cost(Theory(signature=sig)) == 0


def test_incompossible():
    constraints = [xor_unary('s', ['on', 'off']), exists_unique('r')]
    assert incompossible(atom('on', 'a'), atom('off', 'a'), constraints)
    assert not incompossible(atom('on', 'a'), atom('off', 'b'), constraints)
    assert not incompossible(atom('on', 'a'), atom('on', 'a'), constraints)
    assert incompossible(atom('r', 'a', 'b'), atom('r', 'a', 'c'), constraints)
    assert not incompossible(atom('r', 'a', 'b'), atom('r', 'b', 'b'), constraints)
    assert not incompossible(atom('on', 'a'), atom('off', 'a'), [exists_unique('r')])


def test_exclusions_match_incompossible():
    sig = grid_sig()
    constraints = [xor_unary('s', ['on', 'off']), exists_unique('r')]
    exclusions = Exclusions(sig, constraints)
    ground, _ = enumerate_atoms(sig)
    for a in ground:
        assert exclusions.rivals(a) == {b for b in ground if incompossible(a, b, constraints)}
    assert exclusions.unground_clash(atom('on', 'X'), atom('off', 'X'))
    assert not exclusions.unground_clash(atom('on', 'X'), atom('off', 'Y'))
    assert not exclusions.unground_clash(atom('r', 'X', 'Y'), atom('r', 'X', 'X'))


def test_enumerate_atoms():
    ground, unground = enumerate_atoms(grid_sig())
    assert len(ground) == 3 + 3 + 9
    assert len(unground) == 2 + 2 + 4
    assert atom('r', 'c', 'a') in ground
    assert atom('r', 'Y', 'X') in unground


def test_constraint_instances_and_completions():
    sig = running_signature()
    instances = constraint_instances(sig, [xor_unary('sensor', ['on', 'off'])])
    assert [inst.subject for inst in instances] == [('a',), ('b',)]
    everything = list(completions(instances))
    assert len(everything) == 4
    assert all(violated_instance(s, instances) is None for s in everything)
    partial = list(completions(instances, frozenset({atom('on', 'a')})))
    assert set(partial) == {frozenset({atom('on', 'a'), atom('on', 'b')}), frozenset({atom('on', 'a'), atom('off', 'b')})}


def test_exists_unique_instances():
    instances = constraint_instances(grid_sig(), [exists_unique('r')])
    assert len(instances) == 3
    assert instances[0].atoms == (atom('r', 'a', 'a'), atom('r', 'a', 'b'), atom('r', 'a', 'c'))


def test_is_extendable():
    instances = constraint_instances(running_signature(), [xor_unary('sensor', ['on', 'off'])])
    assert is_extendable(instances, frozenset({atom('on', 'a')}))
    assert not is_extendable(instances, frozenset({atom('on', 'a'), atom('off', 'a')}))


def test_violated_instance_reports_missing_and_doubled():
    instances = constraint_instances(running_signature(), [xor_unary('sensor', ['on', 'off'])])
    assert violated_instance(frozenset({atom('on', 'a')}), instances).subject == ('b',)
    both = frozenset({atom('on', 'a'), atom('off', 'a'), atom('on', 'b')})
    assert violated_instance(both, instances).subject == ('a',)


def test_signature_is_canonical_and_extends():
    sig = TypeSignature.build(types=['z', 'a'], objects={'y': 'z', 'x': 'a'})
    assert sig.types == ('a', 'z')
    assert sig.objects == (('x', 'a'), ('y', 'z'))
    bigger = sig.extend(objects={'w': 'a'})
    assert bigger.extends(sig)
    assert not sig.extends(bigger)
    assert bigger.objects_of('a') == ('w', 'x')


@pytest.mark.parametrize('sig, fragment', [
    (TypeSignature(types=('t', 't')), 'duplicate type'),
    (TypeSignature.build(types=['t'], objects={'a': 'u'}), 'unknown type'),
    (TypeSignature.build(types=['t'], objects={'p': 't'}, predicates={'p': ['t']}), 'both a object and a predicate'),
    (TypeSignature.build(types=['t'], predicates={'p': ['t', 't', 't']}), 'arity 3'),
])
def test_validate_signature(sig, fragment):
    assert any(fragment in v for v in validate_signature(sig))


def test_validate_constraints():
    sig = running_signature()
    assert validate_constraints(sig, [xor_unary('sensor', ['on', 'off'])]) == []
    assert validate_constraints(sig, [xor_unary('sensor', ['on'])])
    assert validate_constraints(sig, [exists_unique('on')])


def test_validate_theory_flags_unbound_head():
    sig = grid_sig()
    bad = Theory(signature=sig, rules=(static_rule([atom('on', 'X')], atom('off', 'Y')),))
    assert any('head variables' in v for v in validate_theory(bad))
    ill_typed = Theory(signature=sig, inits=frozenset({atom('on', 'X')}))
    assert any('not well-typed' in v for v in validate_theory(ill_typed))


def test_sequence_access():
    seq = SensorySequence.of([[atom('on', 'a')], []])
    assert len(seq) == 2
    assert seq.state(1) == {atom('on', 'a')}
    assert seq.atom_count() == 1


def test_task_violations():
    assert task_violations(running_task()) == []
    unconstrained = ApperceptionTask(seq=running_task().seq, base_sig=running_signature())
    assert any('in no constraint' in v for v in task_violations(unconstrained))
    ill_typed = ApperceptionTask(seq=SensorySequence.of([[Atom('on', ('zz',))]]), base_sig=running_signature(),
                                 given_constraints=(xor_unary('sensor', ['on', 'off']),))
    assert any('not well-typed' in v for v in task_violations(ill_typed))
    clashing = ApperceptionTask(seq=SensorySequence.of([[atom('on', 'a'), atom('off', 'a')]]),
                                base_sig=running_signature(), given_constraints=(xor_unary('sensor', ['on', 'off']),))
    with pytest.raises(InvalidInputError, match='cannot be extended'):
        check_task(clashing)


def test_solve_options():
    opts = SolveOptions.ablating(['conceptual', 'mincost'], noise_beta=0.5)
    assert opts.skip_conceptual and opts.skip_min_cost and not opts.skip_cover
    assert opts.noisy
    assert opts.noise_beta == Fraction(1, 2)
    assert not SolveOptions().noisy
    with pytest.raises(InvalidInputError):
        SolveOptions.ablating(['everything'])
    with pytest.raises(ValidationError):
        SolveOptions(noise_beta=-1)


def test_is_suitable():
    sig = running_signature()
    assert is_suitable(sig, running_task().seq)
    assert not is_suitable(sig, SensorySequence.of([[atom('lit', 'a')]]))
    assert not is_suitable(sig, SensorySequence.of([[atom('on', 'z')]]))
