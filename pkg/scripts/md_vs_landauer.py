"""Harmonic chain: Langevin MD bond current against the Landauer current.

    python scripts/md_vs_landauer.py --k-left 2 --k-right 0.5 --production 2000000
"""

import argparse
import time

from heatdiode.experiments import tgho5
from heatdiode.md import MDConfig, run_md
from heatdiode.transport import rectification

parser = argparse.ArgumentParser()
parser.add_argument("--k-left", type=float, default=2.0)
parser.add_argument("--k-right", type=float, default=0.5)
parser.add_argument("--production", type=int, default=MDConfig.production_steps)
parser.add_argument("--realizations", type=int, default=MDConfig.realizations)
parser.add_argument("--seed", type=int, default=0)
args = parser.parse_args()

chain, baths = tgho5(args.k_left, args.k_right)
ref = rectification(chain, baths)
md = MDConfig(production_steps=args.production, realizations=args.realizations, base_seed=args.seed)
t0 = time.time()
res = run_md(chain, baths, None, md)
print(f"Landauer J = {ref.total_forward:.6f}")
print(f"MD       J = {res.mean_current:.6f} +/- {res.stderr:.6f}  ({time.time() - t0:.0f} s)")
print(f"relative difference {abs(res.mean_current / ref.total_forward - 1):.2%}")
