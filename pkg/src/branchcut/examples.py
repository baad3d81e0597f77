"""Eight worked examples with their expected verdicts."""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .algebraic import AlgebraicFunctionDef as Alg
from .cauchy import (IntegrandAssignment, closed_form_rational, endpoint_local_model, eval_cauchy,
                     jump_local_model, moment_sequence)
from .config import DEFAULT, Tolerances
from .monodromy import MonodromyContext, classify_monodromy, local_condition_report, sum_of_branches, vanishing_test
from .paths import ArcSegment, LineSegment, ParametricSegment, PiecewisePath, build_partition

T6 = [-1, 0, 18, 0, -48, 0, 32]
T2_PLUS_T3 = [-1, -3, 2, 4]


@dataclass
class Check:
    name: str
    passed: bool
    measured: object = None
    expected: object = None

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "measured": _plain(self.measured),
                "expected": _plain(self.expected)}


@dataclass
class ExampleReport:
    id: int
    title: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, measured=None, expected=None) -> None:
        self.checks.append(Check(name, bool(passed), measured, expected))

    def to_json(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed, "seconds": self.seconds,
                "checks": [c.to_json() for c in self.checks], "details": _plain(self.details)}


def _plain(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return v


def far_field(a: IntegrandAssignment, n: int = 20, factor: float = 10.0, tol: Tolerances | None = None) -> float:
    """Largest ``|I(t)|`` over ``n`` points on the circle ``|t| = factor * radius``."""
    R = a.gamma.radius()
    return max(abs(eval_cauchy(a, factor * R * cmath.exp(2j * math.pi * (k + 0.1) / n), tol)) for k in range(n))


# ---------------------------------------------------------------------------
# builders


def sqrt_on_unit_interval(tol: Tolerances = DEFAULT) -> IntegrandAssignment:
    return IntegrandAssignment.from_values(PiecewisePath.segment(0, 1, tol), Alg.radical(2, [0, 1], tol=tol),
                                           [math.sqrt(0.5)], tol)


def sqrt_on_circle(tol: Tolerances = DEFAULT) -> IntegrandAssignment:
    """``sqrt z`` with value 1 at 1, continued counterclockwise around the unit circle."""
    return IntegrandAssignment.continued(PiecewisePath.circle(tol=tol), Alg.radical(2, [0, 1], tol=tol), 1j, tol)


def _spiral(theta0: float = math.pi / 2, turns: int = 2, wobble: float = 0.1) -> ParametricSegment:
    span = 2 * math.pi * turns

    def th(u):
        return theta0 + span * np.asarray(u, float)

    def f(u):
        t = th(u)
        return (1 + wobble * np.sin(t / 2)) * np.exp(1j * t)

    def df(u):
        t = th(u)
        return span * (0.5 * wobble * np.cos(t / 2) + 1j * (1 + wobble * np.sin(t / 2))) * np.exp(1j * t)

    return ParametricSegment(f, df, "double loop")


def sqrt_on_double_loop(tol: Tolerances = DEFAULT) -> IntegrandAssignment:
    """A closed curve winding twice around 0 carrying a single continued branch of ``sqrt z``."""
    sp = _spiral()
    return IntegrandAssignment.continued(PiecewisePath([sp], True, tol), Alg.radical(2, [0, 1], tol=tol),
                                         cmath.sqrt(complex(sp.point(0.0))), tol, at="start")


def _figure_eight() -> ParametricSegment:
    return ParametricSegment(
        lambda u: 0.5 + 1.5 * np.cos(2 * np.pi * np.asarray(u)) - 0.75j * np.sin(4 * np.pi * np.asarray(u)),
        lambda u: 2 * np.pi * (-1.5 * np.sin(2 * np.pi * np.asarray(u)) - 1.5j * np.cos(4 * np.pi * np.asarray(u))),
        "figure eight")


def figure_eight_sqrt(tol: Tolerances = DEFAULT) -> IntegrandAssignment:
    """``sqrt(z (z - 1))`` continued along a figure eight around 0 and 1, from its positive value at 2."""
    return IntegrandAssignment.continued(PiecewisePath([_figure_eight()], True, tol),
                                         Alg.radical(2, [0, -1, 1], tol=tol), math.sqrt(2), tol, at="start")


def radical_on_interval(r: int, tol: Tolerances = DEFAULT) -> IntegrandAssignment:
    """Positive branch of ``(1 - z^2)^(1/r)`` on ``[-1, 1]``."""
    return IntegrandAssignment.from_values(PiecewisePath.segment(-1, 1, tol), Alg.radical(r, [1, 0, -1], tol=tol),
                                           [1.0], tol)


BOWTIE = [0, 2 + 2j, 2, 2j, 0]
RATIONAL_NUM = [1, 2]
RATIONAL_DEN = [(0.3 + 1j) * 5, -(5.3 + 1j), 1]  # poles at 0.3 + i (left lobe) and 5 (outside)


def rational_on_bowtie(tol: Tolerances = DEFAULT):
    gamma = PiecewisePath.polyline(BOWTIE, closed=True, tol=tol)
    f = Alg.rational(RATIONAL_NUM, RATIONAL_DEN, tol=tol)
    mids = [complex(s.point(0.5)) for s in gamma.segments]
    vals = [complex(np.polyval(RATIONAL_NUM[::-1], z) / np.polyval(RATIONAL_DEN[::-1], z)) for z in mids]
    return IntegrandAssignment.from_values(gamma, f, vals, tol)


def two_component_radical(tol: Tolerances = DEFAULT) -> IntegrandAssignment:
    """``sqrt(1 - z^2)`` on ``[-1, 1]`` plus half of it on a clockwise circle of radius 2."""
    f = Alg.radical(2, [1, 0, -1], tol=tol)
    fh = Alg.radical(2, [1, 0, -1], scale=0.5, tol=tol)
    gamma = PiecewisePath.union([PiecewisePath.segment(-1, 1, tol), PiecewisePath.circle(0, 2, ccw=False, tol=tol)])
    return IntegrandAssignment.from_values(gamma, [f, fh], [1.0, 0.5 * math.sqrt(5)], tol)


def connected_radical(tol: Tolerances = DEFAULT) -> IntegrandAssignment:
    """The two components joined through 0 and 2i by a pair of arcs carrying a linear integrand."""
    f = Alg.radical(2, [1, 0, -1], tol=tol)
    fh = Alg.radical(2, [1, 0, -1], scale=0.5, tol=tol)
    w2 = -0.5 * math.sqrt(5)  # circle branch at 2i
    L = Alg.rational([1, (w2 - 1) / 2j], tol=tol)
    arc1 = ArcSegment.from_points(0, 2j, 1j - 0.5, ccw=True)
    circ = ArcSegment(0, 2, math.pi / 2, -2 * math.pi)
    arc2 = ArcSegment.from_points(2j, 0, 1j + 0.5, ccw=True)
    gamma = PiecewisePath([LineSegment(-1, 0), arc1, circ, arc2, LineSegment(0, 1)], False, tol)

    def lin(z):
        return 1 + (w2 - 1) / 2j * z

    seeds = [math.sqrt(0.75), lin(complex(arc1.point(0.5))), 0.5 * math.sqrt(5), lin(complex(arc2.point(0.5))),
             math.sqrt(0.75)]
    return IntegrandAssignment.from_values(gamma, [f, L, fh, L, f], seeds, tol)


def chebyshev_gamma(tol: Tolerances = DEFAULT) -> PiecewisePath:
    """Source path from ``-sqrt(3)/2`` to ``sqrt(3)/2`` bulging up to ``0.1 i``."""
    h = math.sqrt(3) / 2
    return PiecewisePath([ArcSegment.from_points(-h, h, -3.7j, ccw=False)], False, tol)


def chebyshev_pushforward(tol: Tolerances = DEFAULT) -> IntegrandAssignment:
    return IntegrandAssignment.pushforward(T6, T2_PLUS_T3, chebyshev_gamma(tol), tol)


# ---------------------------------------------------------------------------
# runners


def _example1(rep: ExampleReport, tol: Tolerances) -> None:
    a = sqrt_on_unit_interval(tol)
    quad = 2j * math.pi * eval_cauchy(a, -4.0, tol)
    ref = 2 - 4 * math.atan(0.5)
    rep.add("quadrature at t=-4", abs(quad - ref) < 1e-8, abs(quad - ref), 0.0)
    st = -2j
    closed = 2 - math.pi * 1j * st + st * cmath.log((1 - st) / (1 + st))
    rep.add("closed form with sqrt(t) = -2i", abs(closed - quad) < 1e-8, abs(closed - quad), 0.0)
    m0 = endpoint_local_model(a, 0, tol=tol)
    m1 = endpoint_local_model(a, 1, tol=tol)
    rep.add("no logarithm at 0", abs(m0.log_coefficient[0]) < 1e-8 and m0.finite, abs(m0.log_coefficient[0]))
    rep.add("logarithm at 1", abs(m1.log_coefficient[0]) > 1e-3, abs(m1.log_coefficient[0]))
    rep.add("ramification 2 at 0", m0.ramification_order == 2, m0.ramification_order, 2)
    ms = moment_sequence(a, 6, tol)
    err = max(abs(ms.values[k] - 2 / (2 * k + 3)) for k in range(7))
    rep.add("moments 2/(2k+3)", err < 1e-10, err)


def _example2(rep: ExampleReport, tol: Tolerances) -> None:
    a = sqrt_on_circle(tol)
    m = jump_local_model(a, 1, tol=tol)
    c = m.log_coefficient[0]
    rep.add("logarithm at the jump", abs(c) > 1e-3 and not m.finite, c)
    rep.add("jet residual", m.residual < 1e-6, m.residual)
    v = classify_monodromy(a, L=tol.word_length)
    rep.add("combinatorial monodromy infinite", v.classification == "infinite", v.classification, "infinite")
    rep.details["witness"] = str(v.witness)


def _example3(rep: ExampleReport, tol: Tolerances) -> None:
    a = sqrt_on_double_loop(tol)
    vt = vanishing_test(a)
    rep.add("vanishes near infinity", vt.vanishes_on_D0, vt.vanishes_on_D0, True)
    rep.add("monodromy trivial", vt.monodromy.classification == "trivial", vt.monodromy.classification, "trivial")
    ff = far_field(a, tol=tol)
    rep.add("far field below 1e-8", ff < 1e-8, ff)


def _example4(rep: ExampleReport, tol: Tolerances) -> None:
    a = figure_eight_sqrt(tol)
    v = classify_monodromy(a, L=tol.word_length)
    rep.add("finite of order 2", v.classification == "finite" and v.order == 2, [v.classification, v.order],
            ["finite", 2])
    # loop from 3 around the branch point 1 only
    S = PiecewisePath.polyline([3, 3 - 1.2j, 0.7 - 1.2j, 0.7 + 1.2j, 3 + 1.2j, 3], tol=tol)
    val = complex(sum_of_branches(S, a).evaluated_jet[0])
    rep.add("loop around 1 gives twice the positive branch at 3", abs(val - 2 * math.sqrt(6)) < 1e-10, val,
            2 * math.sqrt(6))


def _example5(rep: ExampleReport, tol: Tolerances) -> None:
    for r in (2, 3, 4):
        a = radical_on_interval(r, tol)
        ctx = MonodromyContext(a, -0.3j)
        v = classify_monodromy(a, L=tol.word_length, ctx=ctx)
        if r == 2:
            rep.add("r=2 finite of order 2", v.classification == "finite" and v.order == 2,
                    [v.classification, v.order], ["finite", 2])
        else:
            worst = max(v.growth_residuals) if v.growth_residuals else math.inf
            rep.add(f"r={r} infinite with linear growth", v.classification == "infinite" and worst < 1e-7,
                    [v.classification, worst], ["infinite", "< 1e-7"])
            rep.details[f"witness_r{r}"] = str(v.witness)


def _example6(rep: ExampleReport, tol: Tolerances) -> None:
    a = rational_on_bowtie(tol)
    v = classify_monodromy(a, L=tol.word_length)
    rep.add("monodromy trivial", v.classification == "trivial", v.classification, "trivial")
    part = build_partition(a.gamma, tol)
    cf = closed_form_rational(RATIONAL_NUM, RATIONAL_DEN, a.gamma, part)
    worst = 0.0
    for reg in part.regions:
        t = reg.point
        ref = cf.evaluate(t, reg.mu)
        got = eval_cauchy(a, t, tol)
        worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    rep.add("rational closed form in every region", worst < 1e-8, worst)
    rep.add("I0 vanishes iff poles outside", not cf.vanishes_on_D0, cf.vanishes_on_D0, False)


def _example7(rep: ExampleReport, tol: Tolerances) -> None:
    for name, a in (("two components", two_component_radical(tol)), ("connected", connected_radical(tol))):
        vt = vanishing_test(a)
        ff = far_field(a, tol=tol)
        rep.add(f"{name}: vanishes near infinity", vt.vanishes_on_D0 and ff < 1e-8, [vt.vanishes_on_D0, ff])
    lcs = local_condition_report(two_component_radical(tol))
    rep.add("local conditions at the endpoints", all(lc.holds for lc in lcs if lc.kind == "endpoint"),
            [lc.holds for lc in lcs])


def _example8(rep: ExampleReport, tol: Tolerances) -> None:
    from .moments import gluing_test

    a = chebyshev_pushforward(tol)
    v = classify_monodromy(a, L=tol.word_length)
    rep.add("monodromy trivial", v.classification == "trivial", v.classification, "trivial")
    vt = vanishing_test(a, verdict=v)
    rep.add("vanishing test", vt.vanishes_on_D0, vt.vanishes_on_D0, True)
    ff = far_field(a, tol=tol)
    rep.add("far field below 1e-8", ff < 1e-8, ff)
    m = jump_local_model(a, -1, tol=tol)
    rep.add("no logarithm at the jump", abs(m.log_coefficient[0]) < 1e-8 and m.jump_present,
            abs(m.log_coefficient[0]))
    h = {"a": "0", "b": "1/2", "d": 3}
    g = gluing_test(T6, T2_PLUS_T3, {"a": "0", "b": "-1/2", "d": 3}, h, tol)
    rep.add("germs on the two sides differ", not g.glued, g.max_mismatch)


TITLES = {
    1: "sqrt z on [0, 1]: closed form and local models",
    2: "sqrt z around the unit circle: logarithmic jump",
    3: "sqrt z on a double loop: vanishing near infinity",
    4: "sqrt(z(z-1)) on a figure eight: finite monodromy",
    5: "(1-z^2)^(1/r) on [-1, 1]: finite for r=2, infinite for r=3,4",
    6: "rational integrand on a bowtie: trivial monodromy, rational I0",
    7: "radical integrand on two curves and on a connected curve: vanishing",
    8: "Chebyshev pushforward: jump without logarithm, vanishing",
}
RUNNERS = {1: _example1, 2: _example2, 3: _example3, 4: _example4, 5: _example5, 6: _example6, 7: _example7,
           8: _example8}


def run_example(n: int, tol: Tolerances = DEFAULT) -> ExampleReport:
    if n not in RUNNERS:
        from .errors import SchemaError

        raise SchemaError(f"example id must be in 1..8, got {n}")
    rep = ExampleReport(n, TITLES[n])
    t0 = time.perf_counter()
    RUNNERS[n](rep, tol)
    rep.seconds = time.perf_counter() - t0
    return rep
