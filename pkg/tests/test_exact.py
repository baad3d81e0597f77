from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import chebyshev_T

from branchcut.errors import SchemaError, UnsupportedEndpointField
from branchcut.exact import (
    Poly, QSqrt, chebyshev, common_right_factor, parse_scalar, right_factors, sturm_count,
)

SETTINGS = settings(max_examples=40, deadline=None)
frac = st.fractions(min_value=-20, max_value=20, max_denominator=12)
field = st.sampled_from([2, 3, 5, -1, 7])
poly = st.lists(frac, min_size=1, max_size=5).map(Poly)


def qs(d):
    return st.builds(lambda a, b: QSqrt(a, b, d), frac, frac)


@SETTINGS
@given(field.flatmap(lambda d: st.tuples(qs(d), qs(d), qs(d))))
def test_quadratic_field_axioms(xyz):
    x, y, z = xyz
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x - x == 0
    assert (x * y).norm() == x.norm() * y.norm()
    if x:
        assert x * (1 / x) == 1
        assert (y / x) * x == y


@SETTINGS
@given(field.flatmap(qs))
def test_quadratic_sign_matches_float(x):
    assume(x.d > 0)
    v = float(x)
    if v != 0:
        assert (x > 0) == (v > 0)


def test_mixed_fields_rejected():
    with pytest.raises(UnsupportedEndpointField):
        QSqrt.sqrt(2) + QSqrt.sqrt(3)
    with pytest.raises(UnsupportedEndpointField):
        parse_scalar(0.5)
    with pytest.raises(SchemaError):
        parse_scalar("x/2")


def test_squarefree_reduction():
    assert QSqrt.sqrt(12) == QSqrt(0, 2, 3)
    assert QSqrt.sqrt(9) == 3
    assert parse_scalar({"a": "1/2", "b": 1, "d": 8}) == QSqrt("1/2", 2, 2)


@pytest.mark.parametrize("n", range(0, 13))
def test_chebyshev_matches_cosine_expansion(n):
    assert chebyshev(n) == Poly(chebyshev_T(n))


def test_chebyshev_nesting():
    assert chebyshev(6) == chebyshev(2).compose(chebyshev(3))
    assert chebyshev(6) == chebyshev(3).compose(chebyshev(2))


@SETTINGS
@given(poly, poly, poly)
def test_compose_is_associative(p, q, r):
    assert p.compose(q).compose(r) == p.compose(q.compose(r))


@SETTINGS
@given(poly, poly)
def test_divmod_identity(p, q):
    assume(not q.is_zero())
    quo, rem = p.divmod(q)
    assert quo * q + rem == p
    assert rem.degree < q.degree or rem.is_zero()


@SETTINGS
@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=4), min_size=1, max_size=6, unique=True),
       st.fractions(min_value=-5, max_value=5, max_denominator=3), st.fractions(min_value=0, max_value=6,
                                                                             max_denominator=3))
def test_sturm_counts_known_roots(roots, lo, width):
    """Distinct rational roots, one of them squared so repeated roots are also exercised."""
    assume(width > 0)
    hi = lo + width
    p = Poly([1])
    for r in roots:
        p = p * Poly([-r, 1])
    p = p * Poly([-roots[0], 1])
    assume(p(lo) != 0)
    assert sturm_count(p, lo, hi) == sum(1 for r in roots if lo < r < hi)


@SETTINGS
@given(st.lists(frac, min_size=3, max_size=4), st.lists(frac, min_size=2, max_size=2))
def test_right_factors_recover_inner(outer, w):
    outer = Poly(outer)
    assume(outer.degree >= 2)
    assume(w[1] != 0)
    W = Poly([0] + list(w) + [1])  # monic cubic through 0
    P = outer.compose(W)
    decs = right_factors(P)
    assert any(d.inner == W for d in decs)
    for d in decs:
        assert d.outer.compose(d.inner) == P


def test_chebyshev_right_factors():
    inners = {tuple(d.inner.c) for d in right_factors(chebyshev(6))}
    assert inners == {tuple(Poly([0, 0, 1]).c), tuple(Poly([0, Fraction(-3, 4), 0, 1]).c)}


def test_common_right_factor():
    W = Poly([0, 1, 0, 1])
    P, Q = Poly([1, 2, 1]).compose(W), Poly([0, 3, 0, 1]).compose(W)
    dec = common_right_factor(P, Q)
    assert dec is not None and dec.inner == W
    assert common_right_factor(chebyshev(2), chebyshev(3)) is None
