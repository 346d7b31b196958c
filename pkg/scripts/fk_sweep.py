"""FK chain rectification against the left onsite amplitude V_L.

Default geometry is the sweep default (period 2 pi, minima on the sites);
``--period 1 --phase 0`` gives the bare V cos(2 pi u) potential.

    python scripts/fk_sweep.py --production 2000000 --realizations 4
"""

import argparse

from heatdiode.experiments import FK_SWEEP_OPTIONS, fk_chain
from heatdiode.md import MDConfig, run_fk_rectification

parser = argparse.ArgumentParser()
parser.add_argument("--v-left", type=float, nargs="+", default=[0.0, 0.25, 0.5, 1.0, 1.5, 2.0])
parser.add_argument("--period", type=float, default=FK_SWEEP_OPTIONS["period"])
parser.add_argument("--phase", type=float, default=FK_SWEEP_OPTIONS["phase"])
parser.add_argument("--form", default="cosine", choices=("cosine", "normalized"))
parser.add_argument("--production", type=int, default=MDConfig.production_steps)
parser.add_argument("--realizations", type=int, default=MDConfig.realizations)
parser.add_argument("--workers", type=int, default=1)
args = parser.parse_args()

md = MDConfig(equilibration_steps=args.production // 5, production_steps=args.production,
              realizations=args.realizations)
opts = dict(period=args.period, phase=args.phase, form=args.form)
print("V_L     J_fwd         J_rev         R        stderr")
for v_left in args.v_left:
    chain, fk = fk_chain(v_left, **opts)
    fwd, rev, r, err = run_fk_rectification(chain, fk, 1.0, 0.1, md, workers=args.workers)
    print(f"{v_left:4.2f}  {fwd.mean_current: .6e}  {rev.mean_current: .6e}  {r:.4f}  {err:.4f}")
chain, fk = fk_chain(1.0, 1.0, k_left=1.0, k_right=1.0, **opts)
*_, r, err = run_fk_rectification(chain, fk, 1.0, 0.1, md, workers=args.workers)
print(f"symmetric control R = {r:.4f} +/- {err:.4f}")
