"""
Exact fronts on tiny instances
==============================

With an exhaustive sub-problem solver, rectangle splitting recovers the
whole Pareto front; so does the classical sweep when its step is small
enough.
"""

# %%
from hrsvrp.hrs import RunConfig, run_classical_ecm, run_hrs
from hrsvrp.oracle import ExactOracle
from hrsvrp.vrp import random_instance

inst = random_instance(7, fleet_size=3, seed=4)
oracle = ExactOracle(inst)
print(len(oracle.solutions), "feasible plans")
front = oracle.pareto()
for sol, p in front:
    print(f"{p.f1:9.3f} {p.f2:8.3f}  {sol.routes}")

# %%
archive, trace = run_hrs(inst, oracle, RunConfig(n_max=10_000, tol=1e-9))
print(len(trace), "sub-problems")
print(archive.points() == [p for _, p in front])

# %%
for r in trace.records[:8]:
    print(r.step, round(r.c, 3), r.point, round(r.rect_area, 1))

# %%
gaps = [b.f2 - a.f2 for (_, a), (_, b) in zip(front[1:], front)]
archive, trace = run_classical_ecm(inst, oracle, RunConfig(classical_epsilon=min(gaps) / 2, tol=1e-9))
print(len(trace), "ECM sub-problems;", archive.points() == [p for _, p in front])
