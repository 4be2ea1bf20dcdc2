"""
Indicators and files
====================

Instance files, benchmark runs, reference sets and quality indicators.
"""

# %%
import tempfile
from pathlib import Path

from hrsvrp import io as bio
from hrsvrp.bench import RunSpec, apply_overrides, merge_reference_sets, metrics_rows, run_benchmark
from hrsvrp.hgs.solver import HgsConfig
from hrsvrp.hrs import RunConfig
from hrsvrp.metrics import compute_reference_point, hypervolume, normalize_sets, unary_epsilon
from hrsvrp.vrp import random_instance

ref = compute_reference_point([[(1, 3), (2, 2), (3, 1)]])
print(ref, hypervolume([(1, 3), (2, 2), (3, 1)], ref))
a, r = normalize_sets([(1.1, 2), (2, 1.1)], [(1, 2), (2, 1)])
print(a, r, unary_epsilon(a, r))

# %%
work = Path(tempfile.mkdtemp())
bio.write_instance(random_instance(16, fleet_size=3, seed=5, name="r16"), work / "r16.vrp")
print((work / "r16.vrp").read_text()[:200])

# %%
hgs, run = apply_overrides(HgsConfig(), RunConfig(n_max=12), {
    "mu": "8", "lam": "8", "n_elite": "3", "n_close": "3", "g": "12",
    "it_initial": "60", "it_subsequent": "15"})
files = []
for algo in ("hrs", "ecm"):
    out = run_benchmark(RunSpec(instance=work / "r16.vrp", algorithm=algo, reps=2, hgs=hgs,
                                run=run, out_dir=work / algo))
    files += out["archives"]
print(*[f.name for f in files], sep="\n")

# %%
reference = merge_reference_sets(files, work / "reference.csv")
print(reference.read_text()[:300])
for row in metrics_rows(files, reference):
    print(row["instance"], round(row["hv_pct"], 2), round(row["epsilon"], 4), row["cardinality"])
