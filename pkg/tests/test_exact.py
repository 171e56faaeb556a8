from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from daffine.errors import DimMismatch, MissingSubstitute, SingularMatrix
from daffine.exact import (
    BaseMap,
    Bilinear,
    Mat,
    Poly,
    Vec,
    as_scalar,
    bilinear_apply,
    format_scalar,
    mat_inverse,
    parse_scalar,
    poly_compose,
)

rationals = st.fractions(min_value=-60, max_value=60, max_denominator=12)


# ---------------------------------------------------------------- scalars

def test_scalar_roundtrip():
    assert format_scalar(F(-4, 6)) == "-2/3"
    assert format_scalar(F(5)) == "5"
    assert parse_scalar("7/2") == F(7, 2)
    assert as_scalar(3) == F(3)


@given(rationals, rationals)
def test_scalar_arithmetic_is_exact(a, b):
    assert (a + b) - b == a


# ---------------------------------------------------------------- matrices

def _det_cofactor_oracle(m: Mat):
    # Independent cofactor-expansion determinant used as the oracle.
    n = m.nrows
    if n == 0:
        return F(1)
    if n == 1:
        return m[0, 0]
    total = F(0)
    for j in range(n):
        minor = Mat(
            [
                [m[r, c] for c in range(n) if c != j]
                for r in range(1, n)
            ]
        )
        total += (-1) ** j * m[0, j] * _det_cofactor_oracle(minor)
    return total


M4 = Mat(
    [
        [F(2), F(1), F(0), F(3)],
        [F(1, 2), F(-1), F(4), F(0)],
        [F(0), F(5), F(1), F(-2)],
        [F(3), F(0), F(0), F(1, 3)],
    ]
)


def test_mat_inverse_identity():
    assert mat_inverse(Mat.identity(3)) == Mat.identity(3)


def test_mat_inverse_random_4x4_roundtrip():
    inv = mat_inverse(M4)
    assert M4 @ inv == Mat.identity(4)
    assert inv @ M4 == Mat.identity(4)


def test_mat_inverse_matches_adjugate_over_det():
    det = _det_cofactor_oracle(M4)
    assert det == M4.det()
    adj = M4.adjugate()
    assert adj.scale(1 / det) == mat_inverse(M4)


def test_mat_inverse_singular_raises():
    with pytest.raises(SingularMatrix):
        mat_inverse(Mat([[F(1), F(2)], [F(2), F(4)]]))


def test_kernel_and_solve():
    m = Mat([[F(1), F(2), F(3)], [F(2), F(4), F(6)]])
    ker = m.kernel()
    assert len(ker) == 2
    for v in ker:
        assert (m @ v).is_zero()
    b = Vec.of(6, 12)
    x = m.solve(b)
    assert m @ x == b
    assert m.solve(Vec.of(1, 0)) is None


def test_vec_dim_mismatch():
    with pytest.raises(DimMismatch):
        Vec.of(1, 2) + Vec.of(1, 2, 3)


@given(st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3))
def test_vec_addition_cancels(a, b):
    va, vb = Vec(a), Vec(b)
    assert (va + vb) - vb == va


# ---------------------------------------------------------------- bilinear

def test_bilinear_apply_1x1x1():
    g = Bilinear([[[F(7)]]])
    assert g.apply(Vec.of(2), Vec.of(3)) == Vec.of(42)


def test_bilinear_apply_matches_loop_oracle():
    g = Bilinear(
        [
            [[F(1), F(2)], [F(0), F(-1)]],
            [[F(1, 2), F(0)], [F(3), F(5)]],
        ]
    )
    u = Vec.of(2, -3)
    w = Vec.of(F(1, 2), 4)
    # oracle: fully unrolled triple loop in the opposite iteration order
    expect = [F(0), F(0)]
    for b in range(2):
        for i in range(2):
            for t in range(2):
                expect[t] += g[t, i, b] * u[i] * w[b]
    assert bilinear_apply(g, u, w) == Vec(expect)


def test_bilinear_contractions_consistent():
    g = Bilinear(
        [
            [[F(1), F(2), F(0)], [F(3), F(0), F(1)]],
        ]
    )
    u, w = Vec.of(5, -2), Vec.of(1, 2, 3)
    assert g.left_vec(u) @ w == g.apply(u, w)
    assert g.right_vec(w) @ u == g.apply(u, w)
    A = Mat([[F(1), F(1)], [F(0), F(2)]])
    B = Mat([[F(1), F(0)], [F(2), F(1)], [F(0), F(3)]])
    up, wp = Vec.of(1, -1), Vec.of(2, 5)
    assert g.left_mat(A).apply(up, w) == g.apply(A @ up, w)
    assert g.right_mat(B).apply(u, wp) == g.apply(u, B @ wp)
    S = Mat([[F(4)], [F(-1)]]).transpose()
    assert g.post(Mat([[F(2)]])).apply(u, w) == g.apply(u, w).scale(2)
    assert S.shape == (1, 2)


def test_bilinear_zero_annihilates():
    g = Bilinear.zero(2, 2, 2)
    assert g.apply(Vec.of(1, 2), Vec.of(3, 4)) == Vec.zero(2)


# ---------------------------------------------------------------- polynomials

def test_poly_identity_substitution():
    p = Poly(2, {(1, 0): F(2), (0, 1): F(-1), (1, 1): F(3), (0, 0): F(5)})
    ident = [Poly.variable(2, 0), Poly.variable(2, 1)]
    assert poly_compose(p, ident) == p


def test_poly_binomial_compose():
    # (x+1)^2 composed with x -> x-1 gives x^2
    p = (Poly.variable(1, 0) + 1) ** 2
    q = Poly.variable(1, 0) - 1
    assert poly_compose(p, [q]) == Poly.variable(1, 0) ** 2


def test_poly_compose_matches_evaluation_oracle():
    x1, x2 = Poly.variable(2, 0), Poly.variable(2, 1)
    cubic = 3 * x1**3 - x1 * x2 + F(1, 2) * x2**2 + 7
    aff1 = 2 * x1 - x2 + 1
    aff2 = x1 + F(1, 3)
    composed = poly_compose(cubic, [aff1, aff2])
    pts = [
        (F(0), F(0)),
        (F(1), F(2)),
        (F(-1), F(1, 2)),
        (F(3, 4), F(-2)),
        (F(5), F(5)),
        (F(-1, 3), F(7, 2)),
        (F(2), F(-3)),
        (F(1, 7), F(1, 7)),
        (F(-4), F(9)),
        (F(10), F(-1, 5)),
    ]
    for pt in pts:
        inner = (aff1.eval(pt), aff2.eval(pt))
        assert composed.eval(pt) == cubic.eval(inner)


def test_poly_missing_substitute():
    p = Poly(2, {(1, 1): F(1)})
    with pytest.raises(MissingSubstitute):
        p.subst({0: Poly.variable(1, 0)})


def test_poly_str_canonical():
    p = Poly(2, {(1, 1): F(3), (0, 0): F(-1, 2)})
    assert str(p) == "3*x1*x2 - 1/2"
    assert str(Poly.zero(3)) == "0"


@given(st.lists(rationals, min_size=4, max_size=4), st.lists(rationals, min_size=4, max_size=4))
def test_poly_ring_axioms(cs, ds):
    x, y = Poly.variable(2, 0), Poly.variable(2, 1)
    p = cs[0] + cs[1] * x + cs[2] * y + cs[3] * x * y
    q = ds[0] + ds[1] * x + ds[2] * y + ds[3] * x * x
    assert p * q == q * p
    assert (p + q) - q == p
    pt = (F(2, 3), F(-5))
    assert (p * q).eval(pt) == p.eval(pt) * q.eval(pt)


# ---------------------------------------------------------------- base maps

def test_basemap_roundtrip_and_pullback():
    bm = BaseMap(Mat([[F(1), F(2)], [F(0), F(1)]]), Vec.of(3, -1))
    x = Vec.of(F(1, 2), F(5))
    assert bm.inverse().apply(bm.apply(x)) == x
    assert bm.then(bm.inverse()).apply(x) == x
    f = Poly(2, {(2, 0): F(1), (0, 1): F(4)})
    # pullback oracle: evaluate at the image point
    assert bm.pullback(f).eval(tuple(x)) == f.eval(tuple(bm.apply(x)))


def test_basemap_rejects_singular():
    with pytest.raises(SingularMatrix):
        BaseMap(Mat([[F(0)]]), Vec.of(1))
