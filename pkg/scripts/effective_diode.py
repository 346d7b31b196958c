"""Temperature-dependent end frictions: delta J against the bias, with a log-log fit."""

import numpy as np

from heatdiode.checks import effective_scaling

biases = np.geomspace(0.02, 0.2, 9)
reps = effective_scaling(0.05, biases)
delta = np.array([r.delta for r in reps])
for b, r in zip(biases, reps):
    print(f"dT = {b:.4f}  J = {r.total_forward:.6e}  delta J = {r.delta:.6e}")
print(f"log-log exponent {np.polyfit(np.log(biases), np.log(np.abs(delta)), 1)[0]:.4f}")
