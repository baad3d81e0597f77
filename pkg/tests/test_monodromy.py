import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from branchcut.algebraic import AlgebraicFunctionDef as Alg
from branchcut.cauchy import IntegrandAssignment, eval_cauchy
from branchcut.errors import NotAdmissible
from branchcut.examples import figure_eight_sqrt, rational_on_bowtie, sqrt_on_circle
from branchcut.monodromy import (
    LoopWord, MonodromyContext, classify_monodromy, continue_integral, local_condition_report, sum_of_branches,
    vanishing_test, word_action,
)
from branchcut.paths import LineSegment, PiecewisePath

SETTINGS = settings(max_examples=15, deadline=None)
grid = st.integers(-2500, 2500).map(lambda k: k / 1000)
point = st.builds(complex, grid, grid)


def inverse_on_circle():
    gamma = PiecewisePath.circle(0, 1)
    return IntegrandAssignment.from_values(gamma, Alg.rational([1], [0, 1]), [1 / complex(gamma.segments[0].point(0.5))])


def test_path_inside_one_region_has_empty_sum():
    a = inverse_on_circle()
    s = sum_of_branches(PiecewisePath.segment(2, 3 + 1j), a)
    assert not s.vector.any() and s.is_zero(1e-12)


def test_crossing_into_circle_continues_integral():
    a = inverse_on_circle()
    S = PiecewisePath.segment(2, 0.3 + 0.2j)
    s = sum_of_branches(S, a)
    assert s.vector.sum() == 1
    rep = continue_integral(a, S)
    assert rep.max_deviation < 1e-7
    for t, v in zip(rep.samples, rep.continued):
        # the outside function -1/t continued inside
        assert abs(v + 1 / t) < 1e-7
        assert abs(eval_cauchy(a, t) - v - 1 / t) < 1e-7


def test_sqrt_circle_is_infinite_with_linear_growth():
    v = classify_monodromy(sqrt_on_circle(), L=4)
    assert v.classification == "infinite"
    assert len(v.growth_residuals) == 3 and max(v.growth_residuals) < 1e-7


def test_bowtie_pole_inside_does_not_vanish():
    vt = vanishing_test(rational_on_bowtie())
    assert vt.monodromy.classification == "trivial"
    assert not vt.vanishes_on_D0


def test_poles_outside_vanish_and_far_field_confirms():
    gamma = PiecewisePath.polyline([0, 2 + 2j, 2, 2j, 0], closed=True)
    num, den = np.array([1.0, 2.0]), np.array([-5.0, 1.0])
    mids = [complex(s.point(0.5)) for s in gamma.segments]
    a = IntegrandAssignment.from_values(gamma, Alg.rational(num, den), [(1 + 2 * z) / (z - 5) for z in mids])
    vt = vanishing_test(a)
    assert vt.monodromy.classification == "trivial" and vt.vanishes_on_D0
    R = 10 * gamma.radius()
    far = max(abs(eval_cauchy(a, R * cmath.exp(2j * math.pi * (k + 0.3) / 20))) for k in range(20))
    assert far < 1e-8


def test_figure_eight_local_conditions():
    # no endpoints or jumps: only the branch points can break the conditions, and both do
    lcs = local_condition_report(figure_eight_sqrt())
    assert all(lc.holds for lc in lcs if lc.kind != "singular")
    assert sorted(round(lc.point.real) for lc in lcs if not lc.holds) == [0, 1]


def test_figure_eight_loop_gives_twice_positive_branch():
    # a loop from 3 around the branch point 1 only
    a = figure_eight_sqrt()
    S = PiecewisePath.polyline([3, 3 - 1.2j, 0.7 - 1.2j, 0.7 + 1.2j, 3 + 1.2j, 3])
    s = sum_of_branches(S, a)
    assert abs(s.evaluated_jet[0] - 2 * math.sqrt(6)) < 1e-10
    assert continue_integral(a, S).max_deviation < 1e-7


def test_basepoint_on_curve_rejected():
    a = sqrt_on_circle()
    with pytest.raises(NotAdmissible):
        MonodromyContext(a, 1j)


@pytest.fixture(scope="module")
def eight_ctx():
    a = figure_eight_sqrt()
    return a, MonodromyContext(a, 0.5 - 1.6j)


@pytest.mark.parametrize("w1, w2", [
    (((0, 1),), ((1, 1),)),
    (((1, -1),), ((0, 1), (1, 1))),
    (((0, 1), (0, 1)), ((1, -1),)),
])
def test_word_composition_law(eight_ctx, w1, w2):
    a, ctx = eight_ctx
    W1, W2 = LoopWord.of(w1), LoopWord.of(w2)
    chained = word_action(W2, word_action(W1, None, ctx), ctx)
    direct = sum_of_branches(ctx.realize(W1 * W2), a, ctx.forbidden, ctx.basis)
    assert np.allclose(chained.evaluated_jet, direct.evaluated_jet, atol=1e-8)


@SETTINGS
@given(point, point, point)
def test_branch_sum_is_homotopy_invariant(s0, s1, c):
    """A straight auxiliary path versus a detour through ``c`` sweeping no marked point."""
    a = figure_eight_sqrt()
    marks = list(a.sigma) + list(a.sigma1)
    tri = [s0, c, s1]
    assume(min(abs(s0 - s1), abs(c - s0), abs(c - s1)) > 0.3)
    assume(abs(((c - s0).conjugate() * (s1 - s0)).imag) > 0.05)
    assume(a.gamma.distance(s0) > 0.05 and a.gamma.distance(s1) > 0.05)

    def inside(p):
        s = [((q2 - q1).conjugate() * (p - q1)).imag for q1, q2 in zip(tri, tri[1:] + tri[:1])]
        return all(x > 0 for x in s) or all(x < 0 for x in s)

    def clear(path):
        return all(path.distance(p) > 0.05 for p in marks)

    straight = PiecewisePath([LineSegment(s0, s1)], False)
    detour = PiecewisePath([LineSegment(s0, c), LineSegment(c, s1)], False)
    assume(clear(straight) and clear(detour) and not any(inside(p) for p in marks))
    try:
        u = sum_of_branches(straight, a)
        v = sum_of_branches(detour, a, basis=u.basis)
    except NotAdmissible:
        assume(False)
    assert np.allclose(u.evaluated_jet, v.evaluated_jet, atol=1e-8 * u.basis.scale())


def test_verdict_json_shape():
    v = classify_monodromy(figure_eight_sqrt(), L=4)
    d = v.to_json()
    assert set(d) == {"classification", "order", "witness_word", "orbit_size", "growth_residuals", "parameters"}
    assert d["parameters"]["word_length"] == 4
