"""Theory synthesis for sensory sequences: find the cheapest unified theory that explains what was seen."""

from .errors import ApperceptionError, BudgetExhausted, InvalidInputError, ResourceLimitError
from .logic import Atom, Constraint, Rule, SensorySequence, Theory, TypeSignature, atom, cost
from .problem import ApperceptionTask, SearchBudget, SolveOptions
from .solver import SolveResult, cost_noise, solve, solve_generalized, solve_noisy, solve_template
from .tasks import MaskedTask
from .trace import detect_period, evaluate
from .unity import check_unity

__all__ = [
    'ApperceptionError', 'BudgetExhausted', 'InvalidInputError', 'ResourceLimitError',
    'Atom', 'Constraint', 'Rule', 'SensorySequence', 'Theory', 'TypeSignature', 'atom', 'cost',
    'ApperceptionTask', 'SearchBudget', 'SolveOptions',
    'SolveResult', 'cost_noise', 'solve', 'solve_generalized', 'solve_noisy', 'solve_template',
    'MaskedTask', 'detect_period', 'evaluate', 'check_unity',
]
