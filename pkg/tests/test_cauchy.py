import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rational_cauchy, sqrt_interval_integral

from branchcut.algebraic import AlgebraicFunctionDef as Alg
from branchcut.cauchy import (
    IntegrandAssignment, closed_form_rational, endpoint_local_model, eval_cauchy, jump_local_model,
    moment_sequence, tail_series,
)
from branchcut.errors import NotClosed, PointOnCurve, SchemaError
from branchcut.examples import RATIONAL_DEN, RATIONAL_NUM, rational_on_bowtie, sqrt_on_unit_interval
from branchcut.paths import ArcSegment, PiecewisePath, build_partition

SETTINGS = settings(max_examples=15, deadline=None)


def rational_on(gamma, num, den):
    mids = [complex(s.point(0.5)) for s in gamma.segments]
    vals = [np.polyval(num[::-1], z) / np.polyval(den[::-1], z) for z in mids]
    return IntegrandAssignment.from_values(gamma, Alg.rational(num, den), vals)


def jump(a, z, n, eps):
    """``I(z + eps n) - I(z - eps n)`` with Richardson extrapolation in ``eps``."""
    d1 = eval_cauchy(a, z + eps * n) - eval_cauchy(a, z - eps * n)
    d2 = eval_cauchy(a, z + 0.5 * eps * n) - eval_cauchy(a, z - 0.5 * eps * n)
    return 2 * d2 - d1


def test_constant_on_circle_is_winding():
    a = rational_on(PiecewisePath.circle(0, 1), np.array([1.0]), np.array([1.0]))
    assert abs(eval_cauchy(a, 0.3 + 0.1j) - 1) < 1e-12
    assert abs(eval_cauchy(a, 3)) < 1e-12


def test_sqrt_interval_against_antiderivative():
    a = sqrt_on_unit_interval()
    for t in (-0.5, -4.0, -20.0):
        assert abs(2j * math.pi * eval_cauchy(a, t) - sqrt_interval_integral(t)) < 1e-10


def test_point_on_curve_rejected():
    with pytest.raises(PointOnCurve):
        eval_cauchy(sqrt_on_unit_interval(), 0.5)


def test_moments_of_sqrt():
    ms = moment_sequence(sqrt_on_unit_interval(), 8)
    assert np.allclose(ms.values, [2 / (2 * k + 3) for k in range(9)], atol=1e-12, rtol=0)
    assert ms.tail_residual < 1e-8
    with pytest.raises(SchemaError):
        moment_sequence(sqrt_on_unit_interval(), -1)


def test_tail_series_converges():
    a = sqrt_on_unit_interval()
    ms = moment_sequence(a, 40, check_tail=False)
    for t in (5.0, -4 + 3j, 6j):
        assert abs(tail_series(ms.values, t) - eval_cauchy(a, t)) < 1e-12


def test_bowtie_closed_form_regions():
    a = rational_on_bowtie()
    part = build_partition(a.gamma)
    cf = closed_form_rational(RATIONAL_NUM, RATIONAL_DEN, a.gamma, part)
    for reg in part.regions:
        assert abs(eval_cauchy(a, reg.point) - cf.evaluate(reg.point, reg.mu)) < 1e-10
    with pytest.raises(NotClosed):
        closed_form_rational([1], [1], PiecewisePath.segment(0, 1))


@SETTINGS
@given(st.floats(-2.5, 2.5), st.floats(-2.5, 2.5))
def test_rational_matches_closed_form_anywhere(x, y):
    t = complex(x, y)
    a = rational_on_bowtie()
    if a.gamma.distance(t) < 1e-3:
        return
    ref = rational_cauchy(np.array(RATIONAL_NUM, complex), np.array(RATIONAL_DEN, complex),
                          np.concatenate([s.point(np.linspace(0, 1, 5000, endpoint=False)) for s in a.gamma.segments]),
                          t)
    assert abs(eval_cauchy(a, t) - ref) <= 1e-8 * max(1.0, abs(ref))


@SETTINGS
@given(st.floats(0.15, 0.85))
def test_side_jump_on_interval(s):
    # left of the oriented segment [0, 1] is the upper side
    a = sqrt_on_unit_interval()
    z = complex(s)
    assert abs(jump(a, z, 1j, 1e-4) - math.sqrt(s)) < 1e-6


@SETTINGS
@given(st.floats(0.05, 0.95), st.floats(0.3, 3.0))
def test_side_jump_on_arc(u, r):
    seg = ArcSegment(0.2j, r, 0.3, 2.0)
    gamma = PiecewisePath([seg], False)
    a = rational_on(gamma, np.array([1, 2, 0.5j]), np.array([4.0 + 4j, 1.0]))
    z = complex(seg.point(u))
    tangent = complex(seg.deriv(u))
    n = 1j * tangent / abs(tangent)
    g = np.polyval([0.5j, 2, 1], z) / (z + 4 + 4j)
    assert abs(jump(a, z, n, 1e-4) - g) < 1e-6 * max(1, abs(g))


def test_double_point_additivity():
    # bowtie strands through 1+1i: edge 0 runs 0 -> 2+2i and edge 2 runs 2 -> 2i
    a = rational_on_bowtie()
    z = 1 + 1j
    for d in (1 + 1j, -2 + 2j):
        n = 1j * d / abs(d)
        # move off the crossing along this strand, then cross it
        base = z + 0.05 * d / abs(d)
        g = complex(np.polyval(RATIONAL_NUM[::-1], base) / np.polyval(RATIONAL_DEN[::-1], base))
        assert abs(jump(a, base, n, 1e-4) - g) < 1e-6


def test_endpoint_log_coefficients_signs():
    # regular nonzero g: -g/(2 pi i) at the start, +g/(2 pi i) at the end
    gamma = PiecewisePath.segment(0.5, 2 + 1j)
    a = rational_on(gamma, np.array([1.0, 1.0]), np.array([1.0]))
    s = endpoint_local_model(a, 0.5)
    e = endpoint_local_model(a, 2 + 1j)
    assert abs(s.log_coefficient[0] + 1.5 / (2j * math.pi)) < 1e-10
    assert abs(e.log_coefficient[0] - (3 + 1j) / (2j * math.pi)) < 1e-10
    assert s.residual < 1e-6 and e.residual < 1e-6


def test_jump_without_discontinuity_has_no_log():
    gamma = PiecewisePath.polyline([0, 1, 1 + 1j])
    a = rational_on(gamma, np.array([2.0, 1.0]), np.array([1.0]))
    m = jump_local_model(a, 1)
    assert abs(m.log_coefficient[0]) < 1e-10 and not m.jump_present


def test_jump_between_branches_has_log():
    gamma = PiecewisePath.polyline([-1j, 1, 1 + 1j])
    f = Alg.radical(2, [4, 1])
    w0, w1 = cmath.sqrt(4 + 0.5 - 0.5j), cmath.sqrt(4 + 1 + 0.5j)
    a = IntegrandAssignment.from_values(gamma, f, [w0, -w1])
    m = jump_local_model(a, 1)
    # (g_in - g_out) / (2 pi i) with g_in = sqrt 5 and g_out = -sqrt 5
    assert abs(m.log_coefficient[0] - 2 * math.sqrt(5) / (2j * math.pi)) < 1e-9
