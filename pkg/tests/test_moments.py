import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import poly_moment_exact

from branchcut.cauchy import IntegrandAssignment, moment_sequence
from branchcut.errors import EndpointImagesDiffer, UnsupportedEndpointField
from branchcut.examples import T6, T2_PLUS_T3
from branchcut.exact import Poly, QSqrt
from branchcut.moments import (
    decompose_pcc, definiteness_evidence, double_moment_analysis, generating_function, gluing_test,
    linear_recurrence, poly_moments, tilde_relation_check,
)
from branchcut.paths import PiecewisePath

SETTINGS = settings(max_examples=25, deadline=None)
small = st.fractions(min_value=-3, max_value=3, max_denominator=4)
coeffs = st.lists(small, min_size=2, max_size=4)


def composed(outer_p, outer_q, c):
    """``P = outer_p(W)``, ``Q = outer_q(W)`` with ``W = x^2 + c x``, so ``W(a) = W(-c - a)``."""
    W = Poly([0, c, 1])
    return Poly(outer_p).compose(W), Poly(outer_q).compose(W)


@SETTINGS
@given(coeffs, coeffs, small, small)
def test_poly_moments_match_expansion(P, Q, a, b):
    tab = poly_moments(P, Q, a, b, 5)
    assert tab.method == "exact"
    assert tab.exact == [poly_moment_exact(P, Q, a, b, k) for k in range(6)]


def test_quadratic_endpoints_stay_exact():
    h = QSqrt(0, Fraction(1, 2), 3)
    tab = poly_moments(T6, [0, 1], -h, h, 6)
    assert tab.method == "exact"
    assert tab.exact == [poly_moment_exact(T6, [0, 1], -h, h, k) for k in range(7)]


def test_mixed_fields_fall_back_to_50_digits():
    a, b = QSqrt.sqrt(2), QSqrt.sqrt(3)
    tab = poly_moments([0, 1, 1], [1], a, b, 3)
    assert tab.method == "numeric50"
    mpmath.mp.dps = 30
    for k in range(4):
        ref = mpmath.quad(lambda x: (x * x + x) ** k * (2 * x + 1), [mpmath.sqrt(2), mpmath.sqrt(3)])
        assert abs(tab.values[k] - complex(ref)) < 1e-14 * max(1, abs(complex(ref)))
    with pytest.raises(UnsupportedEndpointField):
        poly_moments([0, 1, 1], [1], a, b, 3, strict=True)


@SETTINGS
@given(coeffs, coeffs, small, small)
def test_tilde_identity_exact(P, Q, a, b):
    assume(Poly(P).degree >= 1)
    rep = tilde_relation_check(P, Q, a, b, K=6)
    assert rep.identity_exact and rep.m_tilde_0_ok


@SETTINGS
@given(coeffs, coeffs, small, small)
def test_tilde_finite_differences(P, Q, a, b):
    assume(Poly(P).degree >= 1 and a != b)
    rep = tilde_relation_check(P, Q, a, b, K=6)
    assert rep.fd_residual < 1e-7 and rep.series_residual < 1e-9


@SETTINGS
@given(coeffs, coeffs, small, small)
def test_composed_instances_vanish_and_glue(op, oq, c, a):
    assume(Poly(op).degree >= 1 and Poly(oq).degree >= 1)
    P, Q = composed(op, oq, c)
    b = -c - a
    assume(a != b)
    tab = poly_moments(P, Q, a, b, 8)
    assert all(v == 0 for v in tab.exact)
    assert linear_recurrence(tab.exact) == []
    assert P(a) == P(b) and Q(a) == Q(b)
    assert decompose_pcc(P, Q, a, b) is not None
    # gluing needs a non-critical endpoint image
    if P.deriv()(a) != 0 and P.deriv()(b) != 0:
        assert gluing_test(P, Q, a, b).glued


@SETTINGS
@given(coeffs, coeffs, small, small)
def test_vanishing_forces_equal_endpoint_values(P, Q, a, b):
    assume(a != b)
    tab = poly_moments(P, Q, a, b, 8)
    if all(v == 0 for v in tab.exact):
        assert Poly(P)(a) == Poly(P)(b)
        assert Poly(Q)(a) == Poly(Q)(b)


def test_recurrence_detection():
    assert linear_recurrence([Fraction(3) ** k for k in range(8)]) == [3]
    fib = [Fraction(1), Fraction(1)]
    for _ in range(8):
        fib.append(fib[-1] + fib[-2])
    assert linear_recurrence(fib) == [1, 1]
    assert linear_recurrence([Fraction(k * k * k * k * k * k) + 1 for k in range(10)], max_order=2) is None


def test_chebyshev_family_zero():
    h = QSqrt(0, Fraction(1, 2), 3)
    for Q in ([0, 0, 1], [-1, 0, 2], T2_PLUS_T3):
        tab = poly_moments(T6, Q, -h, h, 12)
        assert all(v == 0 for v in tab.exact)


def test_perturbed_chebyshev_not_zero():
    h = QSqrt(0, Fraction(1, 2), 3)
    tab = poly_moments(T6, [0, 1], -h, h, 6)
    assert any(v != 0 for v in tab.exact)
    assert gluing_test(T6, [0, 1], -h, h).glued is False


def test_gluing_requires_equal_images():
    with pytest.raises(EndpointImagesDiffer):
        gluing_test([0, 1], [1], 0, 1)


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=3), st.lists(st.integers(-3, 3), min_size=1, max_size=3),
       st.integers(1, 4))
def test_exact_agrees_with_quadrature(pc, qc, n):
    """Moments of the pushed forward integrand on ``P([0, n/4])`` against exact moments."""
    P = [Fraction(1, 2)] + pc + [1]
    b = Fraction(n, 4)
    crit = np.roots(np.polyder(np.array([float(c) for c in P[::-1]])))
    assume(all(abs(r.imag) > 1e-3 or not (-1e-3 <= r.real <= float(b) + 1e-3) for r in crit))
    Gamma = PiecewisePath.segment(0, float(b))
    asg = IntegrandAssignment.pushforward([float(c) for c in P], [float(c) for c in qc], Gamma)
    ms = moment_sequence(asg, 4, check_tail=False)
    ex = poly_moments(P, qc, 0, b, 4)
    scale = np.max(np.abs(ex.values)) + 1
    assert np.max(np.abs(ms.values - ex.values)) < 1e-9 * scale


def test_generating_function_series_and_cauchy():
    g = generating_function([0, 1, 1], [1, 0, 1], 0, 1, 9 + 2j)
    assert g.series_residual < 1e-12 and g.cauchy_residual < 1e-10
    # direct definition along the segment
    mpmath.mp.dps = 30
    ref = mpmath.quad(lambda x: (1 + x * x) * (1 + 2 * x) / (9 + 2j - x - x * x), [0, 1])
    assert abs(g.value - complex(ref)) < 1e-12


def test_definiteness_with_composition_witness():
    rep = definiteness_evidence([0, 0, 1], -1, 1, witness_q=[0, 0, 0, 0, 1])
    assert rep.refutation == {"moments_vanish": True, "composition": True}
    assert rep.property_e is not False
    assert rep.depth_upper_bound <= rep.depth_of_gamma


def test_double_moments_segment():
    W = [0, -1, 1]  # W(0) = W(1) = 0
    P = Poly([0, 0, 1]).compose(Poly(W))
    rep = double_moment_analysis(P, Poly(W), I=4, J=4, a=0, b=1)
    assert rep.method == "exact" and rep.vanishing
    rep = double_moment_analysis([0, 1], [0, 0, 1], I=3, J=3, a=0, b=1)
    assert not rep.vanishing
    assert rep.grid[0][0] == 1 and abs(rep.grid[0][1] - 1 / 3) < 1e-15


def test_double_moments_laurent_on_circle():
    rep = double_moment_analysis({"num": [1], "den": [0, 1]}, [0, 1], Gamma=PiecewisePath.circle(0, 1), I=2, J=2)
    # P^0 Q^1 P' = -1/x: residue -1
    assert abs(rep.grid[0][1] + 2j * math.pi) < 1e-10


def test_tilde_zero_moment_is_endpoint_difference():
    rep = tilde_relation_check([0, 1], [0, 1], 0, 1, K=3)
    assert rep.m_tilde_0 == 1 and rep.m_tilde_0_ok


def test_tilde_with_vanishing_endpoint_values():
    # Q(0) = Q(1) = 0: the derivative of H is the tilde generating function
    rep = tilde_relation_check([0, 2, 1], [0, -1, 1], 0, 1, K=6)
    assert rep.endpoints_vanish and rep.fd_residual < 1e-8
    assert rep.claim_holds
