"""Higher-order affine level sets over multi-graded spaces.

A space of order n is a direct sum of components indexed by nonzero 0/1
degree vectors of length n.  Polynomial maps between such spaces respect the
filtration when every target coordinate of degree ``mu`` only uses monomials
of componentwise total degree at most ``mu``; together with invertible linear
top blocks this reproduces, at order two, the fibre shape of the chart
transitions in :mod:`daffine.atlas`.

An n-fold affine bundle is cut out by one structure functional per grading
direction, each at level one on its unit-degree component, optionally marked
by a section of the top component.  The cotangent lift doubles the space with
conjugate momentum components and turns the marked section into one more
functional; its side bases recover the original bundle and its duals, and any
two directions restrict to a double affine bundle whose special duals satisfy
the adjoint pairing laws checked by :func:`side_base_duality_report`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

from .double import (
    DecomposedDouble,
    DoubleAffine,
    DoublePoint,
    contains as double_contains,
    horizontal_dual,
    pairing,
    vertical_dual,
)
from .errors import (
    ConstraintViolated,
    DaffineError,
    DimMismatch,
    NotSpecial,
    SingularMatrix,
    SpaceMismatch,
    ZeroFunctional,
)
from .exact import Mat, Poly, Scalar, Vec
from .report import FAIL, PASS, CheckRecord, Report

Degree = Tuple[int, ...]


def _as_degree(n: int, value: Iterable[int]) -> Degree:
    deg = tuple(int(b) for b in value)
    if len(deg) != n:
        raise DimMismatch(f"degree {deg} does not have {n} entries")
    if any(b not in (0, 1) for b in deg):
        raise DaffineError(f"degree entries must be 0 or 1, got {deg}")
    if not any(deg):
        raise DaffineError("components must carry a nonzero degree")
    return deg


def unit_degree(n: int, i: int) -> Degree:
    """The degree vector of the i-th grading direction."""
    if not 0 <= i < n:
        raise DimMismatch(f"no grading direction {i} in order {n}")
    return tuple(1 if k == i else 0 for k in range(n))


@dataclass(frozen=True)
class GradedSpace:
    """A direct sum of components indexed by nonzero 0/1 degree vectors.

    Zero-dimensional components are dropped and the rest are kept in sorted
    degree order, so equal collections of dimensions compare equal.
    """

    n: int
    components: Tuple[Tuple[Degree, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise DaffineError("grading order must be at least 1")
        raw = self.components
        if isinstance(raw, Mapping):
            raw = raw.items()
        canon = []
        seen = set()
        for deg, d in raw:
            deg = _as_degree(self.n, deg)
            d = int(d)
            if d < 0:
                raise DaffineError("component dimensions cannot be negative")
            if deg in seen:
                raise DaffineError(f"duplicate component of degree {deg}")
            seen.add(deg)
            if d:
                canon.append((deg, d))
        object.__setattr__(self, "components", tuple(sorted(canon)))

    def degrees(self) -> Tuple[Degree, ...]:
        return tuple(deg for deg, _ in self.components)

    def dim_of(self, degree: Iterable[int]) -> int:
        deg = tuple(int(b) for b in degree)
        for d, dim in self.components:
            if d == deg:
                return dim
        return 0

    def has(self, degree: Iterable[int]) -> bool:
        return self.dim_of(degree) > 0

    @property
    def total_dim(self) -> int:
        return sum(d for _, d in self.components)

    @property
    def core_degree(self) -> Degree:
        return (1,) * self.n

    @property
    def core_dim(self) -> int:
        return self.dim_of(self.core_degree)

    def labels(self) -> Tuple[Tuple[Degree, int], ...]:
        """Flat coordinate labels (degree, index) in component order."""
        return tuple((deg, j) for deg, d in self.components for j in range(d))

    def offset_of(self, degree: Iterable[int]) -> int:
        """Flat offset of a component's first coordinate."""
        deg = tuple(int(b) for b in degree)
        off = 0
        for d, dim in self.components:
            if d == deg:
                return off
            off += dim
        raise DimMismatch(f"no component of degree {deg}")

    def var_degree(self, k: int) -> Degree:
        return self.labels()[k][0]

    def point(self, assignments: Union[Mapping, Iterable] = ()) -> "GradedPoint":
        """A point from a degree -> coordinates mapping; missing blocks are zero."""
        items = assignments.items() if isinstance(assignments, Mapping) else assignments
        given = {}
        for deg, vals in items:
            deg = _as_degree(self.n, deg)
            if not self.has(deg):
                raise DimMismatch(f"no component of degree {deg}")
            given[deg] = vals if isinstance(vals, Vec) else Vec(vals)
        blocks = tuple(given.get(deg, Vec.zero(d)) for deg, d in self.components)
        return GradedPoint(self, blocks)

    def zero_point(self) -> "GradedPoint":
        return self.point()

    def unflatten(self, values: Sequence[Scalar]) -> "GradedPoint":
        vals = list(values)
        if len(vals) != self.total_dim:
            raise DimMismatch("flat coordinate count does not match the space")
        blocks, off = [], 0
        for _, d in self.components:
            blocks.append(Vec(vals[off:off + d]))
            off += d
        return GradedPoint(self, tuple(blocks))


@dataclass(frozen=True)
class GradedPoint:
    space: GradedSpace
    blocks: Tuple[Vec, ...]

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, Vec) else Vec(b) for b in self.blocks)
        comps = self.space.components
        if len(blocks) != len(comps):
            raise DimMismatch("expected one block per graded component")
        for (deg, d), b in zip(comps, blocks):
            if b.dim != d:
                raise DimMismatch(f"block of degree {deg} must have dimension {d}")
        object.__setattr__(self, "blocks", blocks)

    def block(self, degree: Iterable[int]) -> Vec:
        deg = tuple(int(b) for b in degree)
        for (d, _), b in zip(self.space.components, self.blocks):
            if d == deg:
                return b
        raise DimMismatch(f"no component of degree {deg}")

    def with_block(self, degree: Iterable[int], values) -> "GradedPoint":
        deg = tuple(int(b) for b in degree)
        vec = values if isinstance(values, Vec) else Vec(values)
        out = []
        found = False
        for (d, _), b in zip(self.space.components, self.blocks):
            if d == deg:
                out.append(vec)
                found = True
            else:
                out.append(b)
        if not found:
            raise DimMismatch(f"no component of degree {deg}")
        return GradedPoint(self.space, tuple(out))

    def flat(self) -> Vec:
        return Vec(x for b in self.blocks for x in b)


def drop_direction(space: GradedSpace, k: int) -> GradedSpace:
    """Forget direction k, keeping the components that vanish there."""
    if not 0 <= k < space.n:
        raise DimMismatch(f"no grading direction {k} in order {space.n}")
    if space.n == 1:
        raise DimMismatch("cannot drop the only grading direction")
    dims = {deg[:k] + deg[k + 1:]: d for deg, d in space.components if deg[k] == 0}
    return GradedSpace(space.n - 1, dims)


def project(pt: GradedPoint, k: int) -> GradedPoint:
    """Project a point onto the level space of direction k."""
    sub = drop_direction(pt.space, k)
    kept = {
        deg[:k] + deg[k + 1:]: b
        for (deg, _), b in zip(pt.space.components, pt.blocks)
        if deg[k] == 0
    }
    return sub.point(kept)


# ---------------------------------------------------------------------------
# Filtration-compatible polynomial maps


def _lift_poly(value, nvars: int) -> Poly:
    if isinstance(value, Poly):
        if value.nvars != nvars:
            raise DimMismatch("polynomial has the wrong number of variables")
        return value
    return Poly.const(nvars, value)


def _monomial_degree(space: GradedSpace, exps: Sequence[int]) -> Degree:
    total = [0] * space.n
    for k, e in enumerate(exps):
        if not e:
            continue
        deg = space.var_degree(k)
        for t in range(space.n):
            total[t] += e * deg[t]
    return tuple(total)


def filtration_check(src: GradedSpace, polys: Sequence, dst: Optional[GradedSpace] = None) -> bool:
    """Whether every target coordinate of degree mu uses only monomials of
    componentwise degree at most mu."""
    dst = src if dst is None else dst
    if src.n != dst.n:
        raise DimMismatch("source and target gradings have different orders")
    rows = tuple(_lift_poly(p, src.total_dim) for p in polys)
    if len(rows) != dst.total_dim:
        raise DimMismatch("expected one polynomial per target coordinate")
    for (bound, _), p in zip(dst.labels(), rows):
        for exps, coeff in p.terms.items():
            if not coeff:
                continue
            mdeg = _monomial_degree(src, exps)
            if any(a > b for a, b in zip(mdeg, bound)):
                return False
    return True


def _unit_exp(nvars: int, k: int) -> Tuple[int, ...]:
    return tuple(1 if t == k else 0 for t in range(nvars))


@dataclass(frozen=True)
class FiltrationMorphism:
    """A polynomial map respecting the filtration, with invertible linear top
    blocks in every degree.

    Rows of degree mu are affine in the degree-mu coordinates (anything else
    would break the degree bound), so invertible top blocks make the map a
    fibred change of coordinates; composites stay in the class.
    """

    src: GradedSpace
    dst: GradedSpace
    polys: Tuple[Poly, ...]

    def __post_init__(self):
        if self.src.n != self.dst.n:
            raise DimMismatch("source and target gradings have different orders")
        rows = tuple(_lift_poly(p, self.src.total_dim) for p in self.polys)
        if len(rows) != self.dst.total_dim:
            raise DimMismatch("expected one polynomial per target coordinate")
        object.__setattr__(self, "polys", rows)
        if not filtration_check(self.src, rows, self.dst):
            raise ConstraintViolated("map sends a coordinate above its filtration degree")
        for deg, d in self.dst.components:
            if self.src.dim_of(deg) != d:
                raise SingularMatrix(f"no square top block in degree {deg}")
            if not self.top_block(deg).is_invertible():
                raise SingularMatrix(f"linear top block in degree {deg} is singular")

    def top_block(self, degree: Iterable[int]) -> Mat:
        """The linear coefficient matrix of one degree onto itself."""
        deg = tuple(int(b) for b in degree)
        total = self.src.total_dim
        cols = [k for k, (d, _) in enumerate(self.src.labels()) if d == deg]
        rows = [k for k, (d, _) in enumerate(self.dst.labels()) if d == deg]
        return Mat(
            tuple(
                tuple(self.polys[r].coefficient(_unit_exp(total, c)) for c in cols)
                for r in rows
            )
        )

    def apply(self, pt: GradedPoint) -> GradedPoint:
        if pt.space != self.src:
            raise SpaceMismatch("point does not live in the source space")
        flat = tuple(pt.flat())
        return self.dst.unflatten([p.eval(flat) for p in self.polys])

    def then(self, other: "FiltrationMorphism") -> "FiltrationMorphism":
        if other.src != self.dst:
            raise SpaceMismatch("morphisms do not chain")
        inner = list(self.polys)
        return FiltrationMorphism(
            self.src, other.dst, tuple(p.subst(inner) for p in other.polys)
        )

    @classmethod
    def identity(cls, space: GradedSpace) -> "FiltrationMorphism":
        total = space.total_dim
        return cls(
            space, space, tuple(Poly.variable(total, k) for k in range(total))
        )


# ---------------------------------------------------------------------------
# n-fold affine level sets


@dataclass(frozen=True)
class NAffine:
    """An n-fold affine bundle over a point: the joint level-one set of one
    structure functional per grading direction, optionally marked by a
    section of the top component."""

    space: GradedSpace
    functionals: Tuple[Vec, ...]
    sigma: Optional[Vec] = None

    def __post_init__(self):
        funcs = tuple(l if isinstance(l, Vec) else Vec(l) for l in self.functionals)
        object.__setattr__(self, "functionals", funcs)
        if len(funcs) != self.space.n:
            raise DimMismatch("expected one structure functional per grading direction")
        for i, l in enumerate(funcs):
            deg = unit_degree(self.space.n, i)
            if l.dim != self.space.dim_of(deg):
                raise DimMismatch(f"functional {i + 1} must live on the degree {deg} component")
            if l.is_zero():
                raise ZeroFunctional(f"structure functional {i + 1} is zero")
        if self.sigma is not None:
            sig = self.sigma if isinstance(self.sigma, Vec) else Vec(self.sigma)
            object.__setattr__(self, "sigma", sig)
            if sig.dim != self.space.core_dim or sig.dim == 0:
                raise DimMismatch("marked section must live in the top-degree component")
            if sig.is_zero():
                raise NotSpecial("marked core section is zero")
            # At order one the top component is the only component, so the
            # marked translation preserves the level set only along the model.
            if self.space.n == 1 and funcs[0].dot(sig) != 0:
                raise NotSpecial("marked section must translate the level set into itself")

    @property
    def order(self) -> int:
        return self.space.n

    @property
    def is_special(self) -> bool:
        return self.sigma is not None

    def level_values(self, pt: GradedPoint) -> Tuple[Scalar, ...]:
        if pt.space != self.space:
            raise SpaceMismatch("point does not live in the underlying space")
        n = self.space.n
        return tuple(
            l.dot(pt.block(unit_degree(n, i))) for i, l in enumerate(self.functionals)
        )

    def contains(self, pt: GradedPoint) -> bool:
        return all(v == 1 for v in self.level_values(pt))

    def point(self, assignments: Union[Mapping, Iterable] = ()) -> GradedPoint:
        pt = self.space.point(assignments)
        if not self.contains(pt):
            raise ConstraintViolated("point violates a structure level")
        return pt


def core_translate(pt: GradedPoint, delta: Vec) -> GradedPoint:
    """Translate the top-degree block; every level projection is unchanged."""
    deg = pt.space.core_degree
    if not pt.space.has(deg):
        raise DimMismatch("the space has no top-degree component")
    return pt.with_block(deg, pt.block(deg) + delta)


# ---------------------------------------------------------------------------
# The cotangent lift and its side bases


def momentum_degree(degree: Degree) -> Degree:
    """Degree of the momenta conjugate to a component: complementary bits in
    the old directions plus a single 1 in the new one."""
    return tuple(1 - b for b in degree) + (1,)


def cotangent_space(space: GradedSpace) -> GradedSpace:
    """The order n+1 space carrying the base components and their conjugate
    momentum components, each of the same dimension."""
    dims = {}
    for deg, d in space.components:
        dims[deg + (0,)] = d
        dims[momentum_degree(deg)] = d
    return GradedSpace(space.n + 1, dims)


def bbl_n(a: NAffine) -> NAffine:
    """The joint level-one set over the cotangent lift: the n structure
    functionals pull back and the marked section becomes an (n+1)-st
    functional on the momenta conjugate to the top component."""
    if a.sigma is None:
        raise NotSpecial("the cotangent lift needs a marked core section")
    return NAffine(cotangent_space(a.space), a.functionals + (a.sigma,), None)


def side_bases(b: NAffine) -> Tuple[NAffine, ...]:
    """The level-set bases of an n-fold bundle, one per direction.

    The k-th base keeps the components vanishing in direction k and inherits
    the other functionals.  When the component conjugate to direction k has
    the matching dimension, the dropped functional is re-read as a marked
    section of the new top component; otherwise the base is left unmarked so
    the mismatch surfaces downstream instead of being papered over.
    """
    n = b.space.n
    if n < 2:
        raise DimMismatch("side bases need at least two grading directions")
    out = []
    for k in range(n):
        sub = drop_direction(b.space, k)
        funcs = tuple(l for j, l in enumerate(b.functionals) if j != k)
        conj = tuple(0 if t == k else 1 for t in range(n))
        sigma_k = None
        if b.space.dim_of(conj) == b.functionals[k].dim:
            sigma_k = b.functionals[k]
        out.append(NAffine(sub, funcs, sigma_k))
    return tuple(out)


# ---------------------------------------------------------------------------
# Two-direction restrictions


def _place(space: GradedSpace, degrees: Tuple[Degree, ...], target: Degree, vec: Vec) -> Vec:
    """Zero-extend a component vector across a list of components."""
    out = []
    for deg in degrees:
        if deg == target:
            out.extend(vec)
        else:
            out.extend([Fraction(0)] * space.dim_of(deg))
    return Vec(out)


@dataclass(frozen=True)
class DoubleRestriction:
    """A two-direction view of an n-fold bundle as a double affine bundle.

    Components are grouped by their bidegree in the chosen directions; the
    (0, 0) class only carries parameters and is discarded.
    """

    source: NAffine
    i: int
    j: int
    double: DoubleAffine
    side1: Tuple[Degree, ...]
    side2: Tuple[Degree, ...]
    core: Tuple[Degree, ...]

    def embed(self, pt: GradedPoint) -> DoublePoint:
        if pt.space != self.source.space:
            raise SpaceMismatch("point does not live in the restricted bundle")
        y = Vec(x for deg in self.side1 for x in pt.block(deg))
        z = Vec(x for deg in self.side2 for x in pt.block(deg))
        c = Vec(x for deg in self.core for x in pt.block(deg))
        return DoublePoint(self.double.space, y, z, c)

    def place_core(self, delta: Vec) -> Vec:
        """Zero-extend a top-component vector into the full core block."""
        return _place(self.source.space, self.core, self.source.space.core_degree, delta)


def restrict_double(a: NAffine, i: int, j: int) -> DoubleRestriction:
    """Restrict to directions (i, j): sides collect the bidegree (1, 0) and
    (0, 1) components, the core collects bidegree (1, 1), and the structure
    data extends by zero."""
    n = a.space.n
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise DimMismatch("restriction needs two distinct grading directions")
    side1 = tuple(d for d, _ in a.space.components if d[i] == 1 and d[j] == 0)
    side2 = tuple(d for d, _ in a.space.components if d[i] == 0 and d[j] == 1)
    core = tuple(d for d, _ in a.space.components if d[i] == 1 and d[j] == 1)
    dims = tuple(
        sum(a.space.dim_of(d) for d in group) for group in (side1, side2, core)
    )
    l1 = _place(a.space, side1, unit_degree(n, i), a.functionals[i])
    l2 = _place(a.space, side2, unit_degree(n, j), a.functionals[j])
    sigma = None
    if a.sigma is not None:
        sigma = _place(a.space, core, a.space.core_degree, a.sigma)
    dd = DoubleAffine(DecomposedDouble(*dims), l1, l2, sigma)
    return DoubleRestriction(a, i, j, dd, side1, side2, core)


# ---------------------------------------------------------------------------
# Verification


def _rand_frac(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-6, 6), rng.randint(1, 4))


def _rand_vec(rng: random.Random, d: int) -> Vec:
    return Vec(_rand_frac(rng) for _ in range(d))


def _point_on(l: Vec, rng: random.Random) -> Vec:
    """A random vector with l(v) = 1."""
    i = next(k for k, x in enumerate(l) if x != 0)
    free = Vec(_rand_frac(rng) if k != i else Fraction(0) for k in range(l.dim))
    return free + Vec.unit(l.dim, i).scale((1 - l.dot(free)) / l[i])


def random_member(a: NAffine, rng: random.Random) -> GradedPoint:
    """A random point of the joint level set with small rational entries."""
    blocks = {deg: _rand_vec(rng, d) for deg, d in a.space.components}
    for i, l in enumerate(a.functionals):
        blocks[unit_degree(a.space.n, i)] = _point_on(l, rng)
    return a.space.point(blocks)


def _dual_pair(rng: random.Random, dd: DoubleAffine) -> Tuple[DoublePoint, DoublePoint]:
    """Random points of the two special duals sharing a core covector."""
    cov = _point_on(dd.sigma, rng)
    phi = DoublePoint(
        vertical_dual(dd.space), _point_on(dd.l1, rng), cov, _rand_vec(rng, dd.space.n2)
    )
    psi = DoublePoint(
        horizontal_dual(dd.space), cov, _point_on(dd.l2, rng), _rand_vec(rng, dd.space.n1)
    )
    return phi, psi


def _mismatch(got: NAffine, want: NAffine) -> str:
    if got.space != want.space:
        return "underlying graded spaces differ"
    if got.functionals != want.functionals:
        return "structure functionals differ"
    return f"marked sections differ: {got.sigma} != {want.sigma}"


def side_base_duality_report(a: NAffine, seed: int = 0, trials: int = 6) -> Report:
    """Check the side-base structure of the cotangent lift of a marked bundle.

    Records cover: the final side base reproducing the bundle, each other side
    base carrying the expected dual data, membership transferring into every
    two-direction restriction, and the restricted special duals satisfying
    the adjoint pairing laws (value independent of the core representative,
    both marked shifts adding one).
    """
    records = []
    n = a.order
    sides = side_bases(bbl_n(a))

    ok = sides[-1] == a
    records.append(
        CheckRecord(
            "final side base recovers the bundle",
            PASS if ok else FAIL,
            witness="match" if ok else _mismatch(sides[-1], a),
            seed=seed,
        )
    )

    for i in range(n):
        s = sides[i]
        expect = tuple(a.functionals[j] for j in range(n) if j != i) + (a.sigma,)
        problems = []
        if s.functionals != expect:
            problems.append("inherited functionals differ")
        if s.sigma != a.functionals[i]:
            problems.append("marked section is not the dropped functional")
        if s.space.core_dim != a.functionals[i].dim:
            problems.append("conjugate top component has the wrong dimension")
        records.append(
            CheckRecord(
                f"side base {i + 1} is the marked dual",
                PASS if not problems else FAIL,
                witness="match" if not problems else "; ".join(problems),
                seed=seed,
            )
        )

    for i in range(n):
        for j in range(i + 1, n):
            tag = f"directions ({i + 1},{j + 1})"
            rng = random.Random(seed * 1_000_003 + 211 * i + 17 * j)
            try:
                r = restrict_double(a, i, j)
                bad = None
                for _ in range(trials):
                    pt = random_member(a, rng)
                    dp = r.embed(pt)
                    if not double_contains(r.double, dp):
                        bad = "level-set point maps outside the restriction"
                        break
                    delta = _rand_vec(rng, a.space.core_dim)
                    moved = r.embed(core_translate(pt, delta))
                    if moved != dp.shift_core(r.place_core(delta)):
                        bad = "core translation does not match the block shift"
                        break
                records.append(
                    CheckRecord(
                        f"{tag} restriction embeds the level set",
                        PASS if bad is None else FAIL,
                        witness=f"{trials} samples" if bad is None else bad,
                        seed=seed,
                    )
                )

                bad = None
                for _ in range(trials):
                    phi, psi = _dual_pair(rng, r.double)
                    base = pairing(phi, psi, r.double)
                    if pairing(phi.shift_core(r.double.l2), psi, r.double) != base + 1:
                        bad = "vertical marked shift does not add one"
                        break
                    if pairing(phi, psi.shift_core(-r.double.l1), r.double) != base + 1:
                        bad = "horizontal marked shift does not add one"
                        break
                records.append(
                    CheckRecord(
                        f"{tag} adjoint duality",
                        PASS if bad is None else FAIL,
                        witness=f"{trials} paired samples" if bad is None else bad,
                        seed=seed,
                    )
                )
            except DaffineError as e:
                records.append(CheckRecord(f"{tag} adjoint duality", FAIL, witness=str(e), seed=seed))

    return Report.of(records)
