"""Environment-driven defaults for the engine."""

# --- Standard Library Imports ---
import os
from fractions import Fraction

# --- CONFIGURATION ---
DEFAULT_BUDGET_SECS = float(os.environ.get('APPERCEPTION_BUDGET_SECS', '600'))
DEFAULT_TEMPLATE_LIMIT = int(os.environ.get('APPERCEPTION_TEMPLATE_LIMIT', '1000'))
DEFAULT_NODE_LIMIT = int(os.environ.get('APPERCEPTION_NODE_LIMIT', '2000000'))
TEMPLATE_BATCH_STEP = int(os.environ.get('APPERCEPTION_BATCH_STEP', '100'))
MAX_TRACE_STATES = int(os.environ.get('APPERCEPTION_MAX_TRACE_STATES', '4096'))
EXTENDABILITY_ATOM_LIMIT = int(os.environ.get('APPERCEPTION_EXTENDABILITY_LIMIT', '20'))
FREE_INIT_LIMIT = int(os.environ.get('APPERCEPTION_FREE_INIT_LIMIT', '3'))
DEFAULT_NOISE_BETA = Fraction(os.environ.get('APPERCEPTION_NOISE_BETA', '1'))
MAX_WORKERS = int(os.environ.get('APPERCEPTION_WORKERS', '1'))
LOG_LEVEL = os.environ.get('APPERCEPTION_LOG_LEVEL', 'INFO').upper()

# --- VALIDATE ESSENTIAL CONFIGURATION ---
if DEFAULT_BUDGET_SECS <= 0:
    raise ValueError("FATAL: APPERCEPTION_BUDGET_SECS must be positive!")
for _name, _value in (
    ('APPERCEPTION_TEMPLATE_LIMIT', DEFAULT_TEMPLATE_LIMIT),
    ('APPERCEPTION_NODE_LIMIT', DEFAULT_NODE_LIMIT),
    ('APPERCEPTION_BATCH_STEP', TEMPLATE_BATCH_STEP),
    ('APPERCEPTION_MAX_TRACE_STATES', MAX_TRACE_STATES),
    ('APPERCEPTION_EXTENDABILITY_LIMIT', EXTENDABILITY_ATOM_LIMIT),
    ('APPERCEPTION_FREE_INIT_LIMIT', FREE_INIT_LIMIT),
    ('APPERCEPTION_WORKERS', MAX_WORKERS),
):
    if _value <= 0:
        raise ValueError(f"FATAL: {_name} must be positive, got {_value}!")
if DEFAULT_NOISE_BETA < 0:
    raise ValueError("FATAL: APPERCEPTION_NOISE_BETA must be nonnegative!")
