"""
Archive and rectangles
======================

Dominance, the non-dominated archive, and how one rectangle is split.
"""

# %%
from hrsvrp.objective_space import ObjectivePoint as P, ParetoArchive, RectangleSet, rect, select_largest
from hrsvrp.hrs import update_rectangles

a = ParetoArchive(tol=0.0)
for p in [(1, 3), (2, 2), (1.5, 2.5), (2, 3), (1, 1)]:
    out = a.insert(P(*p))
    print(p, "accepted" if out.accepted else "rejected", [e.point for e in out.evicted])
a.points()

# %%
# One box from the cost optimum (100, 500) to (f1_max, 0); split at the f2 midpoint.
boxes = RectangleSet([rect((100, 500), (10000, 0))])
split = select_largest(boxes)
c = 0.5 * (split.upper_left.f2 + split.lower_right.f2)
print("c =", c)

# %%
# the sub-problem returns (180, 240): two boxes remain
created, deleted = update_rectangles(boxes, split, P(180, 240), c)
for r in boxes:
    print(r.upper_left, r.lower_right, r.area)

# %%
# an infeasible sub-problem on the lower box discards its lower half
low = min(boxes, key=lambda r: r.upper_left.f2)
c = 0.5 * (low.upper_left.f2 + low.lower_right.f2)
update_rectangles(boxes, low, None, c)
print([(r.upper_left, r.lower_right) for r in boxes])
print("total area", boxes.total_area())
