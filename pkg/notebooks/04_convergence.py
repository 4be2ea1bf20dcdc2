"""
Rectangle splitting versus the classical sweep
==============================================

Hypervolume after each sub-problem on one 25-customer instance, three seeds.
"""

# %%
import numpy as np

from hrsvrp.desk import DESK_HGS, InstanceResult, run_seed
from hrsvrp.vrp import random_instance

inst = random_instance(25, fleet_size=4, seed=103)
res = InstanceResult(inst, [run_seed(inst, s, DESK_HGS, n_max=30, ecm_steps=20) for s in range(3)])
ref = res.reference_point()
print(ref)

# %%
print(" k     HRS      ECM")
for k in (1, 2, 3, 5, 10, 15, 20):
    print(f"{k:2d} {res.median_hv('hrs', k, ref):8.1f} {res.median_hv('ecm', k, ref):8.1f}")
print("30", round(res.median_hv("hrs", 30, ref), 1))

# %%
# harvesting: archive sizes with and without
print([(len(r.hrs[-1]), len(r.hrs_off[-1])) for r in res.seeds])
print("identical sub-problems served from cache:", [r.off_hit_rate for r in res.seeds])

# %%
final = res.seeds[0].hrs[-1]
f = np.array(final)
print(f[:: max(1, len(f) // 8)].round(2))
