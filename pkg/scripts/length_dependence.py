"""Rectification against zone size N_B and interior length N_I (classical)."""

from heatdiode.experiments import zoned_chain
from heatdiode.transport import rectification

print("N_B  N_I  max(R,1/R)")
for n_b in range(1, 11):
    print(f"{n_b:3d}  {1:3d}  {rectification(*zoned_chain(n_b, 1)).rectification:.6f}")
for n_i in (1, 2, 5, 10, 20, 30, 40):
    print(f"{2:3d}  {n_i:3d}  {rectification(*zoned_chain(2, n_i)).rectification:.6f}")
