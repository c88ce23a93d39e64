"""
cli.py

Command-line entry point.

Usage:
    python -m apperception gen-task eca --rule 110 --width 11 --steps 10 --out eca110.task
    python -m apperception solve eca110.task --budget-secs 600 --out results/
    python -m apperception eval suite/ --budget-secs 60 --workers 4
    python -m apperception baseline inertia suite/
    python -m apperception degenerate eca110.task

Exit codes:
    0   success
    1   no theory within the budget
    2   invalid input (bad file, task, flag value or empty suite)
"""

# --- Standard Library Imports ---
import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

# --- Third-party Library Imports ---
from pydantic import ValidationError

# --- Local Imports ---
from .catalog import THEME_SONG
from .config import DEFAULT_BUDGET_SECS, DEFAULT_TEMPLATE_LIMIT, MAX_WORKERS
from .degenerate import build_degenerate_theory
from .errors import BudgetExhausted, InvalidInputError, ResourceLimitError
from .evaluation import CONSTANT, INERTIA, evaluate_baseline, results_table, run_suite
from .formats import format_theory, format_trace, parse_template
from .log import configure_logging
from .logic import Theory, cost
from .problem import SearchBudget, SolveOptions, check_task
from .solver import solve, solve_template
from .tasks import (
    MODES, PREDICT, THREE_BLIND_MICE, TWINKLE, EcaSpec, MaskedTask, load_sequence_task, make_binding_task,
    make_eca_task, make_occlusion_task, make_rhythm_task, melody_presses, read_task, write_task,
)
from .trace import detect_period
from .unity import check_unity

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO_THEORY = 1
EXIT_INVALID = 2

ABLATIONS = ('cover', 'conceptual', 'spatial', 'mincost')
TUNES = {'twinkle': TWINKLE, 'mice': THREE_BLIND_MICE}
TASK_SUFFIX = '.task'


# --- Argument Parsing ---

def _search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--budget-secs', type=float, default=DEFAULT_BUDGET_SECS, help="Wall-clock limit per task.")
    parser.add_argument('--template-limit', type=int, default=DEFAULT_TEMPLATE_LIMIT, help="Templates to visit.")
    parser.add_argument('--noise-beta', type=Fraction, default=None,
                        help="Minimise cost + beta * misses instead of requiring coverage.")
    parser.add_argument('--ablate', action='append', choices=ABLATIONS, default=[],
                        help="Drop one check from the search (repeatable).")
    parser.add_argument('--workers', type=int, default=MAX_WORKERS, help="Worker threads.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='apperception',
                                     description="Synthesise unified theories that make sense of sensory sequences.")
    parser.add_argument('--log-level', default=None, help="Overrides APPERCEPTION_LOG_LEVEL.")
    commands = parser.add_subparsers(dest='command', required=True)

    gen = commands.add_parser('gen-task', help="Write a task file from one of the built-in domains.")
    gen.add_argument('domain', choices=('eca', 'sequence', 'rhythm', 'binding', 'occlusion'))
    gen.add_argument('--rule', type=int, default=110, help="ECA rule number (eca, binding).")
    gen.add_argument('--width', type=int, default=11, help="Cells (eca, binding) or eyes (occlusion).")
    gen.add_argument('--height', type=int, default=2, help="Occlusion grid rows.")
    gen.add_argument('--steps', type=int, default=10, help="Time steps.")
    gen.add_argument('--symbols', default=THEME_SONG, help="Letter sequence, plain or comma-separated.")
    gen.add_argument('--tune', choices=sorted(TUNES), default='twinkle', help="Melody for the rhythm domain.")
    gen.add_argument('--mover', action='append', default=[], metavar='ROW,COL,VEL',
                     help="Occlusion mover (repeatable).")
    gen.add_argument('--mode', choices=MODES, default=PREDICT)
    gen.add_argument('--count', type=int, default=None, help="Atoms to hide; all eligible when omitted.")
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--out', type=Path, default=None, help="Task file to write (stdout when omitted).")

    solve_cmd = commands.add_parser('solve', help="Find the best theory for one task file.")
    solve_cmd.add_argument('task', type=Path)
    _search_flags(solve_cmd)
    solve_cmd.add_argument('--template', type=Path, default=None, help="Search only this template file.")
    solve_cmd.add_argument('--out', type=Path, default=None,
                           help="Directory for <name>.theory, <name>.trace and <name>.unity.")

    eval_cmd = commands.add_parser('eval', help="Solve and score every *.task file in a directory.")
    eval_cmd.add_argument('suite', type=Path)
    _search_flags(eval_cmd)
    eval_cmd.add_argument('--out', type=Path, default=None, help="Results table to write (stdout when omitted).")

    base = commands.add_parser('baseline', help="Score the constant or inertia baseline.")
    base.add_argument('kind', choices=(CONSTANT, INERTIA))
    base.add_argument('suite', type=Path, help="A task file or a directory of them.")
    base.add_argument('--out', type=Path, default=None)

    degen = commands.add_parser('degenerate', help="Write the clock-predicate theory that memorises a task.")
    degen.add_argument('task', type=Path)
    degen.add_argument('--out', type=Path, default=None)
    return parser


# --- Helpers ---

def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    logger.info(f"Wrote {out}")


def _load(path: Path) -> MaskedTask:
    if not path.is_file():
        raise InvalidInputError(f"no such task file: {path}")
    return read_task(path.read_text())


def _suite(path: Path) -> List[MaskedTask]:
    if path.is_file():
        return [_load(path)]
    if not path.is_dir():
        raise InvalidInputError(f"no such file or directory: {path}")
    files = sorted(path.glob(f"*{TASK_SUFFIX}"))
    if not files:
        raise InvalidInputError(f"no {TASK_SUFFIX} files in {path}")
    return [_load(f) for f in files]


def _options(args) -> SolveOptions:
    return SolveOptions.ablating(args.ablate, noise_beta=args.noise_beta)


def _budget(args) -> SearchBudget:
    return SearchBudget(seconds=args.budget_secs, template_limit=args.template_limit)


def _parse_mover(text: str):
    parts = text.split(',')
    if len(parts) != 3 or not all(p.strip().lstrip('-').isdigit() for p in parts):
        raise InvalidInputError(f"mover must be ROW,COL,VEL, got {text!r}")
    return tuple(int(p) for p in parts)


def _unity_text(theory: Theory) -> str:
    report = check_unity(theory)
    return report.render() + f"\nunified: {'yes' if report.unified else 'no'}\n"


def _trace_text(theory: Theory, horizon: int) -> str:
    trace = detect_period(theory)
    shown = max(horizon, trace.end)
    header = f"# period starts at {trace.period_start}, length {trace.period_length}\n"
    return header + format_trace(trace.states(shown))


# --- Subcommands ---

def run_gen_task(args) -> int:
    if args.domain == 'eca':
        masked = make_eca_task(EcaSpec(rule_number=args.rule, width=args.width, steps=args.steps),
                               args.mode, args.count, args.seed)
    elif args.domain == 'sequence':
        masked = load_sequence_task(args.symbols, name='sequence', mode=args.mode, count=args.count, seed=args.seed)
    elif args.domain == 'rhythm':
        masked = make_rhythm_task(melody_presses(TUNES[args.tune]), name=args.tune, mode=args.mode,
                                  count=args.count, seed=args.seed)
    elif args.domain == 'binding':
        masked = make_binding_task(EcaSpec(rule_number=args.rule, width=args.width, steps=args.steps),
                                   mode=args.mode, count=args.count, seed=args.seed)
    else:
        movers = [_parse_mover(m) for m in args.mover] or [(1, 1, 1), (2, 3, -1)]
        masked = make_occlusion_task(args.width, args.height, movers, steps=args.steps)
    _emit(write_task(masked), args.out)
    return EXIT_OK


def run_solve(args) -> int:
    masked = _load(args.task)
    task = masked.task
    opts = _options(args)
    budget = _budget(args)
    if args.template is not None:
        check_task(task)
        tpl = parse_template(args.template.read_text())
        try:
            theory = solve_template(task, tpl, opts, budget)
        except BudgetExhausted as e:
            logger.warning(f"Warning: template search stopped on its budget after {e.nodes} nodes")
            theory = e.best
    else:
        theory = solve(task, budget, opts, workers=args.workers).theory
    if theory is None:
        print(f"❌ no theory for {task.name} within the budget", file=sys.stderr)
        return EXIT_NO_THEORY
    print(f"✅ solved {task.name}: cost {cost(theory)}", file=sys.stderr)
    theory_text = format_theory(theory, comment=f"{task.name} cost {cost(theory)}")
    trace_text = _trace_text(theory, len(task.seq))
    unity_text = _unity_text(theory)
    if args.out is None:
        sys.stdout.write(theory_text + '\n' + trace_text + '\n' + unity_text)
    else:
        _emit(theory_text, args.out / f"{task.name}.theory")
        _emit(trace_text, args.out / f"{task.name}.trace")
        _emit(unity_text, args.out / f"{task.name}.unity")
    return EXIT_OK


def run_eval(args) -> int:
    tasks = _suite(args.suite)
    results, summary = run_suite(tasks, _budget(args), _options(args), workers=args.workers)
    _emit(results_table(results), args.out)
    print(summary.render(), file=sys.stderr)
    return EXIT_OK


def run_baseline(args) -> int:
    tasks = _suite(args.suite)
    results = [evaluate_baseline(masked, args.kind) for masked in tasks]
    for r in results:
        if r.error:
            print(f"❌ {r.task}: {r.error}", file=sys.stderr)
    _emit(results_table(results), args.out)
    accurate = sum(1 for r in results if r.accurate)
    print(f"{args.kind}: {accurate}/{len(results)} accurate", file=sys.stderr)
    return EXIT_OK


def run_degenerate(args) -> int:
    task = _load(args.task).task
    check_task(task)
    theory = build_degenerate_theory(task)
    _emit(format_theory(theory, comment=f"degenerate theory for {task.name}, cost {cost(theory)}"), args.out)
    return EXIT_OK


COMMANDS = {
    'gen-task': run_gen_task,
    'solve': run_solve,
    'eval': run_eval,
    'baseline': run_baseline,
    'degenerate': run_degenerate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    if args.log_level:
        configure_logging(args.log_level.upper())
    else:
        configure_logging()
    try:
        return COMMANDS[args.command](args)
    except (InvalidInputError, ValidationError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_NO_THEORY
    except OSError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_INVALID
