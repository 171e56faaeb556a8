"""Higher-order instances: the side-base ladder of a graded bundle.

Run with ``python3 demos/graded_sides.py``.
"""

import random

from daffine.naffine import bbl_n, restrict_double, side_base_duality_report, side_bases
from daffine.randgen import rand_naffine

rng = random.Random(19)
a = rand_naffine(rng, 3)

print("order:", a.space.n)
for deg, d in a.space.components:
    print("  component", "".join(map(str, deg)), "has dimension", d)
print("marked:", a.is_special)

# bbl_n hangs the dual tower off the marked section; side_bases walks it,
# one direction at a time, and lands back on the original instance.
tower = bbl_n(a)
sides = side_bases(tower)
print("\nladder length:", len(sides), " (last one is the instance itself:", sides[-1] == a, ")")

# Any two distinct directions cut out an ordinary double affine instance.
r = restrict_double(a, 0, 1)
print("restriction to directions (1,2): dims", r.double.space.dims,
      " special:", r.double.is_special)
print("side degrees:", r.side1, "|", r.side2, " core degrees:", r.core)

report = side_base_duality_report(a, seed=3, trials=4)
print("\n" + report.to_text())
