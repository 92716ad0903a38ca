"""Timing comparison of the compiled trial kernel against the NumPy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--trials N] [--seed S]

The backend is fixed at import time by SEQFUSE_BACKEND, so the script
re-executes itself once per backend and gathers the child measurements.
Both backends consume the per-trial random stream identically, so the
estimates they return must match exactly; the script checks that before
printing the table.
"""

import argparse
import json
import os
import subprocess
import sys
import time

SCENARIOS = ("example1", "example2", "csprt-fig3", "glr-fading")


def measure(trials: int, seed: int) -> None:
    from seqfuse import KERNEL_BACKEND
    from seqfuse.cli import load_scenario
    from seqfuse.distributions import Hypothesis
    from seqfuse.montecarlo import estimate

    rows = []
    for name in SCENARIOS:
        scenario = load_scenario(name)
        estimate(scenario, Hypothesis.H1, 50, seed)  # warm-up
        start = time.perf_counter()
        est = estimate(scenario, Hypothesis.H1, trials, seed)
        elapsed = time.perf_counter() - start
        rows.append(
            {
                "scenario": name,
                "seconds": elapsed,
                "edd": est.edd,
                "p_error": est.p_error,
            }
        )
    json.dump({"backend": KERNEL_BACKEND, "rows": rows}, sys.stdout)


def run_child(backend: str, trials: int, seed: int):
    env = dict(os.environ, SEQFUSE_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--_measure",
         "--trials", str(trials), "--seed", str(seed)],
        capture_output=True,
        text=True,
        env=env,
    )
    if proc.returncode != 0:
        return None, proc.stderr.strip()
    return json.loads(proc.stdout), None


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--_measure", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args._measure:
        measure(args.trials, args.seed)
        return 0

    pure, err = run_child("pure", args.trials, args.seed)
    if pure is None:
        print(f"pure backend failed:\n{err}", file=sys.stderr)
        return 1
    compiled, err = run_child("compiled", args.trials, args.seed)

    print(f"{args.trials} trials per scenario, single worker\n")
    if compiled is None:
        print("compiled backend unavailable, timing the fallback only\n")
        print(f"{'scenario':<12} {'pure s':>9} {'trials/s':>10}")
        for row in pure["rows"]:
            print(
                f"{row['scenario']:<12} {row['seconds']:>9.3f} "
                f"{args.trials / row['seconds']:>10.0f}"
            )
        return 0

    print(f"{'scenario':<12} {'pure s':>9} {'compiled s':>11} {'speedup':>8}")
    status = 0
    for p_row, c_row in zip(pure["rows"], compiled["rows"]):
        if (p_row["edd"], p_row["p_error"]) != (c_row["edd"], c_row["p_error"]):
            print(f"{p_row['scenario']}: backends disagree!", file=sys.stderr)
            status = 1
        print(
            f"{p_row['scenario']:<12} {p_row['seconds']:>9.3f} "
            f"{c_row['seconds']:>11.3f} {p_row['seconds'] / c_row['seconds']:>7.1f}x"
        )
    return status


if __name__ == "__main__":
    sys.exit(main())
