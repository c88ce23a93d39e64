"""
run_eca_suite.py

Runs the elementary cellular automaton prediction suite: every rule (or the
ones named) on the single-cell start, last step hidden. Scores the solver,
or one of the baselines, and writes the results table.

This can take hours at the default width and budget; it is never part of
the test run.

Usage:
    export APPERCEPTION_BUDGET_SECS=14400
    export APPERCEPTION_WORKERS=8
    python scripts/run_eca_suite.py [--rules 110,30] [--width 11] [--steps 10] [--baseline inertia] [--out eca.csv]

Options:
    --rules RULES       Comma-separated rule numbers (default: all 256).
    --width N           Cells per row (default 11).
    --steps N           Time steps (default 10).
    --baseline KIND     Score constant or inertia instead of running the solver.
    --out PATH          Results table (default: stdout).
"""

import argparse
import sys
from pathlib import Path

from apperception.config import DEFAULT_BUDGET_SECS, DEFAULT_TEMPLATE_LIMIT, MAX_WORKERS
from apperception.evaluation import CONSTANT, INERTIA, results_table, run_suite
from apperception.log import configure_logging
from apperception.problem import SearchBudget
from apperception.tasks import EcaSpec, make_eca_task


def parse_rules(text: str):
    if not text:
        return list(range(256))
    rules = sorted({int(r) for r in text.split(",") if r.strip()})
    bad = [r for r in rules if not 0 <= r <= 255]
    if bad:
        raise ValueError(f"rule numbers out of range: {bad}")
    return rules


def main():
    parser = argparse.ArgumentParser(description="Run the ECA prediction suite.")
    parser.add_argument("--rules", default="", help="Comma-separated rule numbers (default: all 256).")
    parser.add_argument("--width", type=int, default=11)
    parser.add_argument("--steps", type=int, default=10)
    parser.add_argument("--baseline", choices=(CONSTANT, INERTIA), default=None)
    parser.add_argument("--out", type=Path, default=None)
    args = parser.parse_args()

    configure_logging()
    try:
        rules = parse_rules(args.rules)
    except ValueError as e:
        print(f"ERROR: {e}")
        sys.exit(2)

    tasks = [make_eca_task(EcaSpec(rule_number=r, width=args.width, steps=args.steps)) for r in rules]
    print(f"Running {len(tasks)} ECA tasks ({args.baseline or 'solver'}), width {args.width}, {args.steps} steps")
    budget = SearchBudget(seconds=DEFAULT_BUDGET_SECS, template_limit=DEFAULT_TEMPLATE_LIMIT)
    results, summary = run_suite(tasks, budget, workers=MAX_WORKERS, baseline=args.baseline)

    table = results_table(results)
    if args.out is None:
        sys.stdout.write(table)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(table)
        print(f"  ✅ Wrote {args.out}")

    failed = [r for r in results if r.error]
    print(f"\n{'=' * 50}")
    print("Summary:")
    print(f"  Tasks        : {summary.tasks}")
    print(f"  Solved       : {summary.solved}")
    print(f"  Accurate     : {summary.accurate} ({summary.percent_accurate:.1f}%)")
    print(f"  Input bits   : {summary.mean_bits:.1f}")
    print(f"  Mean seconds : {summary.mean_seconds:.2f}")
    if failed:
        print(f"  Failed       : {len(failed)}")
        for r in failed:
            print(f"    ❌ {r.task}: {r.error}")


if __name__ == "__main__":
    main()
