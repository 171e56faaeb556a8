"""Walk up the cotangent tower of a trivial bundle.

Shows the four reduced sets, the two flow families they quotient by, the
contact normalization ``tau``, the degree-reversal ``kappa``, and the zero
level embedding ``iota``.

Run with ``python3 demos/cotangent_tower.py``.
"""

import random
from fractions import Fraction

from daffine.double import contains
from daffine.exact import Vec
from daffine.phase import (
    AFFCTG,
    BBL,
    CONTACT,
    PHASEP,
    CotangentPoint,
    OneForm,
    TrivialBispecial,
    afftg_and_duals,
    beta,
    build,
    chi,
    contact_double_affine,
    iota,
    iota_inverse,
    kappa,
    lifts,
    tau,
    to_double_point,
)

rng = random.Random(11)
E = TrivialBispecial(2, 2)  # base dim 2, middle block of size 2
print("hull dim:", E.hull_dim, " alpha slot:", E.alpha_index, " v slot:", E.v_index)


def rand_frac():
    return Fraction(rng.randint(-6, 6), rng.choice((1, 2, 3)))


def rand_point(bundle):
    return CotangentPoint(
        bundle,
        Vec(rand_frac() for _ in range(bundle.base_dim)),
        Vec(rand_frac() for _ in range(bundle.hull_dim)),
        Vec(rand_frac() for _ in range(bundle.base_dim)),
        Vec(rand_frac() for _ in range(bundle.hull_dim)),
    )


def member(ps):
    pt = rand_point(ps.bundle)
    for slot, val in ps.constraints:
        pt = pt.with_slot(slot, val)
    return ps.reduce(pt)


# The tower: one quotient per kind, with masks growing as slots are forgotten.
for kind in (BBL, PHASEP, CONTACT, AFFCTG):
    ps = build(kind, E)
    print(f"{kind:8s} mask={sorted(ps.mask)} constraints={sorted(ps.constraints)}")

# The two level functions are untouched by the chi flows: the flows move the
# complementary pair of slots.
pt = rand_point(E)
print("\nlevels before flow:", lifts(pt))
print("levels after chi(3, -2):", lifts(chi(Fraction(3), Fraction(-2), pt)), "(unchanged)")
phasep = build(PHASEP, E)
w = member(build(BBL, E)).point
print("phase class is flow invariant:", phasep.reduce(chi(Fraction(5), Fraction(1), w)) == phasep.reduce(w))

# tau pins the remaining lift of a contact point; kappa flips it into the
# dual bundle, reversing the distinguished core direction.
contact = build(CONTACT, E)
c = member(contact)
t = tau(c)
print("\ntau output mask:", sorted(t.mask))
k = kappa(c)
dual_contact = build(CONTACT, E.dual_bundle())
print("kappa lands in the dual contact set:", dual_contact.contains(k))
print("beta twice is the identity:", beta(beta(c.point)) == c.point)

# The zero levels of the contact double carry a copy of the model: iota is a
# bijection onto them.
x = Vec(rand_frac() for _ in range(2))
u = Vec(rand_frac() for _ in range(2))
p = Vec(rand_frac() for _ in range(2))
mu = Vec(rand_frac() for _ in range(2))
w0 = iota(E, x, u, p, mu)
print("\niota image has zero lifts:", lifts(w0.point) == (Fraction(0), Fraction(0)))
print("iota inverts:", iota_inverse(w0) == (x, u, p, mu))

# Everything above sits inside one double affine instance per fiber.
a = contact_double_affine(E)
print("\ncontact double dims:", a.space.dims, " special:", a.is_special)
print("double image of c sits on the level set:", contains(a, to_double_point(contact, c)))

# A base covector turns the plain set into a matched pair of duals; the
# report lists which of the comparisons hold.
rep = afftg_and_duals(E, OneForm(Vec.of(1, -2)))[2]
print("\n" + rep.to_text())
