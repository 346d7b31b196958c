"""Run one named sweep and print its summary.

    python scripts/sweep.py fig3_contour --out results/fig3 --workers 4
    python scripts/sweep.py fig6_quantum_diagonal --points 50001
"""

import argparse
from pathlib import Path

from heatdiode.experiments import EXPERIMENTS, ExperimentSpec, run_experiment, summarize

parser = argparse.ArgumentParser()
parser.add_argument("name", choices=sorted(EXPERIMENTS))
parser.add_argument("--out", type=Path, default=Path("results"))
parser.add_argument("--regime")
parser.add_argument("--points", type=int, help="trapezoid grid size")
parser.add_argument("--workers", type=int, default=1)
parser.add_argument("--seed", type=int)
args = parser.parse_args()

config = {"quadrature": {"points": args.points}} if args.points else {}
res = run_experiment(ExperimentSpec(args.name, {}, args.out / args.name, args.regime, args.seed, args.workers, config))
summarize([res], args.out / args.name)
print((args.out / args.name / "summary.txt").read_text(), end="")
