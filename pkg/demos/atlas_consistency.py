"""Chart bookkeeping: cocycle reports and what a bad transition looks like.

Builds a three-chart family, checks self-loops / inverse pairs / triangles,
then corrupts one transition and prints the resulting witnesses.

Run with ``python3 demos/atlas_consistency.py``.
"""

import dataclasses
import random

from daffine.atlas import (
    check_atlas_model_hull,
    cocycle_check,
    first_difference,
    induce_hull,
    induce_model,
    linearize,
)
from daffine.exact.poly import Poly
from daffine.randgen import three_chart_atlas

rng = random.Random(7)
atlas = three_chart_atlas(rng, m=2, dims=(1, 2, 1))
print("charts:", sorted(atlas.charts), " fiber dims:", atlas.fiber_dims)

report = cocycle_check(atlas)
print("\n-- consistent family --")
print(report.to_text())

# Induced model / hull charts inherit consistency, so their reports pass too.
print("model charts pass:", cocycle_check(atlas.mapped(induce_model)).passed)
print("hull charts pass:", cocycle_check(atlas.mapped(induce_hull)).passed)
print("hull restricts back:", check_atlas_model_hull(atlas).passed)

# Dropping the quadratic part of a transition in either side order gives the
# same linear family.
for src, dst, t in atlas.edges:
    diff = first_difference(linearize(t, first="side1"), linearize(t, first="side2"))
    assert diff is None, diff
print("\npartial linearizations commute on every edge")

# Now break one edge: add a constant to a gamma00 coefficient of the a->c
# transition. Inverse-pair and triangle checks both locate the change.
def corrupt(t):
    g = list(t.gamma00)
    g[0] = g[0] + Poly.const(g[0].nvars, 2)
    return dataclasses.replace(t, gamma00=tuple(g))


bad = tuple(
    (src, dst, corrupt(t) if (src, dst) == ("a", "c") else t)
    for src, dst, t in atlas.edges
)
broken = dataclasses.replace(atlas, edges=bad)

print("\n-- perturbed family --")
print(cocycle_check(broken).to_text())
