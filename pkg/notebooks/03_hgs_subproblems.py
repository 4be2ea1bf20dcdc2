"""
Constrained sub-problems with the genetic search
================================================

Solve the unconstrained problem, then a range-constrained one warm-started
from the returned search state.
"""

# %%
import math
import time

from hrsvrp.hgs.solver import HgsConfig, HgsSolver
from hrsvrp.hrs import SolverRequest
from hrsvrp.vrp import is_feasible, random_instance

inst = random_instance(30, fleet_size=4, seed=7)
cfg = HgsConfig(mu=10, lam=10, n_elite=4, n_close=3, g=20)
solver = HgsSolver(inst, cfg, seed=1)

t = time.perf_counter()
first = solver.solve(SolverRequest(math.inf, None, 300))
sol, p = first.best
print(f"cost optimum {p.f1:.2f}, range {p.f2:.2f}  ({time.perf_counter() - t:.1f}s)")
print([round(x, 1) for x in sol.lengths])

# %%
c = p.f2 / 4
t = time.perf_counter()
resp = solver.solve(SolverRequest(c, first.new_state, 50))
if resp.feasible:
    s2, p2 = resp.best
    print(f"f2 <= {c:.2f}: cost {p2.f1:.2f}, range {p2.f2:.2f}, feasible {is_feasible(s2, inst, c)}")
print(len(resp.harvested), "feasible population members", f"({time.perf_counter() - t:.1f}s)")

# %%
# the same state and request give the same answer
again = HgsSolver(inst, cfg, seed=999).solve(SolverRequest(c, first.new_state, 50))
print(again.best[1] == resp.best[1] if resp.feasible else again.best is None)

# %%
st = resp.new_state
print(len(st.feasible), "feasible /", len(st.infeasible), "infeasible individuals; penalties", st.pp)
