"""Run every figure experiment at desk scale and write CSV + SVG to results/.

    python3 scripts/reproduce_figures.py --seed 0 --trials 30 --out results
"""
import argparse
import time
from pathlib import Path

from offloadgame.experiments import (DEFAULT_GRIDS, GeneratorSpec, experiment_convergence,
                                     experiment_scaling, experiment_sweep_B,
                                     experiment_sweep_D)
from offloadgame.io import emit, save_result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--large-n", action="store_true",
                    help="also run the scaling experiment for N = 10..50 "
                         "(branch-and-bound optimum above 20 users)")
    args = ap.parse_args()

    spec = GeneratorSpec()
    jobs = [
        ("convergence", lambda: experiment_convergence(spec, args.seed)),
        ("sweep-d", lambda: experiment_sweep_D(spec, DEFAULT_GRIDS["sweep-d"],
                                               args.trials, args.seed)),
        ("sweep-b", lambda: experiment_sweep_B(spec, DEFAULT_GRIDS["sweep-b"],
                                               args.trials, args.seed)),
        ("scaling", lambda: experiment_scaling(spec, DEFAULT_GRIDS["scaling"],
                                               args.trials, args.seed)),
    ]
    for name, job in jobs:
        t0 = time.perf_counter()
        r = job()
        save_result(r, args.out / f"{name}_{args.seed}.json")
        paths = emit(r, args.out, ["csv", "svg"])
        print(f"{name:12s} {time.perf_counter() - t0:6.1f} s  "
              + " ".join(p.name for p in paths))

    if args.large_n:
        t0 = time.perf_counter()
        r = experiment_scaling(spec, list(range(10, 51, 10)), args.trials, args.seed)
        r.experiment = "scaling-large"
        emit(r, args.out, ["csv"])
        print(f"scaling-large {time.perf_counter() - t0:6.1f} s")


if __name__ == "__main__":
    main()
