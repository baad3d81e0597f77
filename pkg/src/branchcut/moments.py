"""One-sided and double moments of polynomial and rational data.

Exact arithmetic is used whenever the endpoints live in Q or Q(sqrt d);
everything else goes through 50-digit evaluation of the exact antiderivative
or adaptive Gauss-Legendre quadrature along the integration path.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

import mpmath
import numpy as np

from .algebraic import (AlgebraicFunctionDef, MappedSegment, germ_from_sheet, monodromy_generators, poly_roots,
                        polyval, track_segment)
from .cauchy import IntegrandAssignment, MomentTable, eval_cauchy
from .config import DEFAULT, Tolerances
from .errors import (CriticalPointOnPath, EndpointImagesDiffer, ExactUnavailable, NotAdmissible, PathTooClose, SchemaError,
                     TrackingAmbiguity, UnsupportedEndpointField)
from .exact import (Decomposition, Poly, QSqrt, adic_digits, chebyshev, factor_through, parse_scalar, poly_gcd,
                    right_factor_candidate, right_factors, scalar_json, sturm_count)
from .paths import ArcSegment, LineSegment, PiecewisePath, build_partition, crossing_sequence, point_depth, \
    winding_number

__all__ = [
    "ExactMomentTable", "poly_moments", "generating_function", "tilde_relation_check", "gluing_test",
    "decompose_pcc", "chebyshev", "right_factors", "definiteness_evidence", "double_moment_analysis",
    "RationalFunction", "linear_recurrence", "bowed_arc",
]

MP_DIGITS = 50
MP_TOL = 1e-30


# ---------------------------------------------------------------------------
# inputs


def as_poly(P) -> Poly:
    """Exact polynomial from a Poly, a coefficient list, or ``[re, im]`` pairs (Gaussian rationals)."""
    if isinstance(P, Poly):
        return P
    if isinstance(P, dict) and "coeffs" in P:
        P = P["coeffs"]
    out = []
    for v in P:
        if isinstance(v, float):
            out.append(Fraction(v))
        elif isinstance(v, complex):
            out.append(QSqrt(Fraction(v.real), Fraction(v.imag), -1) if v.imag else Fraction(v.real))
        elif isinstance(v, (list, tuple)) and len(v) == 2:
            re, im = (Fraction(x) if isinstance(x, float) else parse_scalar(x) for x in v)
            out.append(QSqrt(re, im, -1) if im else re)
        else:
            out.append(parse_scalar(v))
    return Poly(out)


def as_endpoint(v):
    """Exact scalar when possible, otherwise a Python complex."""
    if isinstance(v, (int, Fraction, QSqrt, str, dict)):
        return parse_scalar(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QSqrt))


def _cx(x) -> complex:
    return complex(x)


def _mp(x):
    if isinstance(x, QSqrt):
        if x.d < 0:
            return mpmath.mpc(_mp(x.a), _mp(x.b) * mpmath.sqrt(-x.d))
        return _mp(x.a) + _mp(x.b) * mpmath.sqrt(x.d)
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return mpmath.mpf(x)
    return mpmath.mpc(x)


def _mp_eval(poly: Poly, x):
    acc = _mp(poly.c[-1])
    for a in reversed(poly.c[:-1]):
        acc = acc * x + _mp(a)
    return acc


def _exact_diff(F: Poly, a, b):
    """``F(b) - F(a)``; exact when possible, else 50-digit."""
    if _is_exact(a) and _is_exact(b):
        try:
            return F(b) - F(a), True
        except UnsupportedEndpointField:
            pass
    with mpmath.workdps(MP_DIGITS):
        v = _mp_eval(F, _mp(b)) - _mp_eval(F, _mp(a))
        return complex(v), False


def _same(x, y, scale: float = 1.0, rel: float = 1e-12) -> bool:
    if _is_exact(x) and _is_exact(y):
        try:
            return x == y
        except UnsupportedEndpointField:
            pass
    return abs(_cx(x) - _cx(y)) <= rel * max(1.0, scale)


def _coeffs(P: Poly) -> np.ndarray:
    return np.array(P.to_complex(), complex)


# ---------------------------------------------------------------------------
# exact moments


@dataclass
class ExactMomentTable(MomentTable):
    exact: list | None = None

    def to_json(self) -> dict:
        out = super().to_json()
        if self.exact is not None:
            out["exact"] = [scalar_json(v) for v in self.exact]
        return out


def _integral_table(integrands: Sequence[Poly], a, b, method_hint: str = "") -> ExactMomentTable:
    vals, exact_vals, all_exact = [], [], True
    for g in integrands:
        v, ok = _exact_diff(g.antideriv(), a, b)
        all_exact &= ok
        vals.append(v)
        exact_vals.append(v if ok else None)
    cvals = np.array([_cx(v) for v in vals], complex)
    if all_exact:
        return ExactMomentTable(cvals, np.zeros(len(cvals)), "exact", None, exact_vals)
    errs = MP_TOL * np.maximum(1.0, np.abs(cvals))
    return ExactMomentTable(cvals, errs, "numeric50", None, None)


def poly_moments(P, Q, a, b, K: int, strict: bool = False) -> ExactMomentTable:
    """``m_k = int_a^b P^k Q P' dx`` for ``k = 0..K``.

    With ``strict`` an endpoint outside Q / Q(sqrt d) raises instead of
    falling back to 50-digit evaluation.
    """
    if K < 0:
        raise SchemaError("K must be non-negative")
    P, Q = as_poly(P), as_poly(Q)
    a, b = as_endpoint(a), as_endpoint(b)
    if strict and not (_is_exact(a) and _is_exact(b)):
        raise UnsupportedEndpointField("endpoints are not exact", a=str(a), b=str(b))
    g = Q * P.deriv()
    integrands = []
    for _ in range(K + 1):
        integrands.append(g)
        g = g * P
    table = _integral_table(integrands, a, b)
    if strict and table.method != "exact":
        raise UnsupportedEndpointField("endpoints lie in different quadratic fields", a=str(a), b=str(b))
    return table


def tilde_moments(P, Q, a, b, K: int) -> ExactMomentTable:
    """``int_a^b P^k Q' dx`` for ``k = 0..K``."""
    P, Q = as_poly(P), as_poly(Q)
    a, b = as_endpoint(a), as_endpoint(b)
    g = Q.deriv()
    integrands = []
    for _ in range(K + 1):
        integrands.append(g)
        g = g * P
    return _integral_table(integrands, a, b)


def linear_recurrence(values: Sequence, max_order: int = 4, start: int = 0):
    """Shortest recurrence ``m_{k+r} = sum c_i m_{k+i}`` fitting ``values[start:]`` exactly.

    Returns the coefficient list, ``[]`` for the zero sequence, or None.
    """
    seq = list(values[start:])
    if all(v == 0 for v in seq):
        return []
    exact = all(_is_exact(v) for v in seq)
    for r in range(1, max_order + 1):
        if len(seq) < 2 * r + 1:
            break
        if exact:
            M = [[Fraction(0)] * r for _ in range(r)]
            rhs = [seq[r + i] for i in range(r)]
            for i in range(r):
                for j in range(r):
                    M[i][j] = seq[i + j]
            c = _solve_exact(M, rhs)
            if c is None:
                continue
            ok = all(sum(c[j] * seq[k + j] for j in range(r)) == seq[k + r] for k in range(len(seq) - r))
        else:
            A = np.array([[complex(seq[i + j]) for j in range(r)] for i in range(len(seq) - r)])
            y = np.array([complex(seq[i + r]) for i in range(len(seq) - r)])
            c, *_ = np.linalg.lstsq(A, y, rcond=None)
            ok = np.max(np.abs(A @ c - y)) < 1e-10 * max(1.0, np.max(np.abs(y)))
            c = list(c)
        if ok:
            return c
    return None


def _solve_exact(M, rhs):
    n = len(M)
    A = [row[:] + [rhs[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] / A[i][i] for i in range(n)]


# ---------------------------------------------------------------------------
# path quadrature


@lru_cache(maxsize=4)
def _gl(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def path_integral(path: PiecewisePath, fn, tol_abs: float = 1e-13, max_depth: int = 40):
    """``int_path fn(x) dx`` by adaptive 16-point Gauss-Legendre; ``fn`` maps nodes to ``(..., n)``."""
    x, w = _gl(16)
    total, err = 0.0, 0.0

    def panel(seg, s0, s1):
        s = s0 + (s1 - s0) * x
        z = np.asarray(seg.point(s), complex)
        dz = np.asarray(seg.deriv(s), complex) * (s1 - s0)
        return np.asarray(fn(z)) @ (w * dz)

    for seg in path.segments:
        stack = [(0.0, 1.0, panel(seg, 0.0, 1.0), 0)]
        while stack:
            s0, s1, whole, depth = stack.pop()
            m = 0.5 * (s0 + s1)
            left, right = panel(seg, s0, m), panel(seg, m, s1)
            diff = float(np.max(np.abs(left + right - whole)))
            if diff <= max(tol_abs * (s1 - s0), 1e-15 * float(np.max(np.abs(whole)) + 1e-300)) or depth >= max_depth:
                total = total + left + right
                err += diff
            else:
                stack.append((s0, m, left, depth + 1))
                stack.append((m, s1, right, depth + 1))
    return total, err


def _segment_path(a, b) -> PiecewisePath:
    return PiecewisePath.segment(_cx(a), _cx(b))


def bowed_arc(a, b, bulge: float = 0.05) -> PiecewisePath:
    """Circular arc from ``a`` to ``b`` bulging to the left of the chord by ``bulge * |b - a|``."""
    a, b = _cx(a), _cx(b)
    c = abs(b - a)
    h = bulge * c
    R = (c * c / 4 + h * h) / (2 * h)
    u = (b - a) / c
    center = 0.5 * (a + b) - 1j * u * (R - h)
    return PiecewisePath([ArcSegment.from_points(a, b, center, ccw=False)], False)


# ---------------------------------------------------------------------------
# generating function


@dataclass
class GeneratingValue:
    t: complex
    value: complex
    series: complex | None
    cauchy: complex | None
    series_residual: float | None
    cauchy_residual: float | None
    error: float

    def to_json(self) -> dict:
        return {"t": self.t, "value": self.value, "series": self.series, "cauchy": self.cauchy,
                "series_residual": self.series_residual, "cauchy_residual": self.cauchy_residual,
                "error": self.error}


def _h_direct(P: Poly, Q: Poly, path: PiecewisePath, t: complex, num: Poly | None = None) -> tuple[complex, float]:
    Pc = _coeffs(P)
    Nc = _coeffs(num if num is not None else Q * P.deriv())
    val, err = path_integral(path, lambda x: polyval(Nc, x) / (t - polyval(Pc, x)))
    return complex(val), err


def generating_function(P, Q, a, b, t: complex, Gamma: PiecewisePath | None = None, check_series: bool = True,
                        check_cauchy: bool = True, tol: Tolerances = DEFAULT) -> GeneratingValue:
    """``H(t) = int Q P' / (t - P) dx`` along ``Gamma`` (default the segment ``[a, b]``)."""
    P, Q = as_poly(P), as_poly(Q)
    if a is not None:
        a, b = as_endpoint(a), as_endpoint(b)
    path = Gamma if Gamma is not None else _segment_path(a, b)
    t = complex(t)
    if Q.is_zero():
        return GeneratingValue(t, 0j, 0j, 0j, 0.0, 0.0, 0.0)
    val, err = _h_direct(P, Q, path, t)
    Pc = _coeffs(P)
    zs = polyval(Pc, _sample_path(path, 257))
    R = float(np.max(np.abs(zs)))
    series = sres = None
    if check_series and abs(t) > 1.5 * R:
        K = max(4, int(math.ceil(math.log(1e-17) / math.log(R / abs(t)))) if R > 0 else 4)
        K = min(K, 400)
        ms = _path_moments(P, Q, a, b, Gamma, K)
        series = complex(sum(m * t ** (-k - 1) for k, m in enumerate(ms)))
        sres = abs(series - val)
    cval = cres = None
    if check_cauchy:
        try:
            asg = IntegrandAssignment.pushforward(P.to_complex(), Q.to_complex(), path, tol)
        except CriticalPointOnPath:
            # same endpoints, no interior critical points; only valid when t is not enclosed between the two
            if Gamma is not None:
                raise
            asg = IntegrandAssignment.pushforward(P.to_complex(), Q.to_complex(), bowed_arc(a, b, 0.2), tol)
        cval = -2j * math.pi * eval_cauchy(asg, t, tol)
        cres = abs(cval - val)
    return GeneratingValue(t, val, series, cval, sres, cres, err)


def _sample_path(path: PiecewisePath, n: int) -> np.ndarray:
    pts = []
    for seg in path.segments:
        pts.append(np.asarray(seg.point(np.linspace(0, 1, n)), complex))
    return np.concatenate(pts)


def _path_moments(P: Poly, Q: Poly, a, b, Gamma, K: int) -> np.ndarray:
    if Gamma is not None and Gamma.closed:
        return np.zeros(K + 1, complex)
    if a is None or b is None:
        a, b = Gamma.start, Gamma.end
    return poly_moments(P, Q, a, b, K).values


# ---------------------------------------------------------------------------
# relation between the two generating functions


@dataclass
class TildeReport:
    identity_exact: bool
    identity_residual: float
    m_tilde_0: Any
    m_tilde_0_ok: bool
    fd_residual: float
    series_residual: float
    endpoints_vanish: bool
    moments_vanish: bool
    tilde_vanish: bool
    claim_holds: bool | None
    samples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"identity_exact": self.identity_exact, "identity_residual": self.identity_residual,
                "m_tilde_0": scalar_json(self.m_tilde_0) if _is_exact(self.m_tilde_0) else _cx(self.m_tilde_0),
                "m_tilde_0_ok": self.m_tilde_0_ok, "fd_residual": self.fd_residual,
                "series_residual": self.series_residual, "endpoints_vanish": self.endpoints_vanish,
                "moments_vanish": self.moments_vanish, "tilde_vanish": self.tilde_vanish,
                "claim_holds": self.claim_holds, "samples": self.samples}


def tilde_relation_check(P, Q, a, b, K: int = 10, samples: Sequence[complex] | None = None) -> TildeReport:
    """Compare ``dH/dt`` with the boundary terms plus ``H~`` (moments of ``Q'``)."""
    P, Q = as_poly(P), as_poly(Q)
    a, b = as_endpoint(a), as_endpoint(b)
    m = poly_moments(P, Q, a, b, K)
    mt = tilde_moments(P, Q, a, b, K + 1)
    exact = m.method == "exact" and mt.method == "exact"
    Pa, Pb, Qa, Qb = P(a), P(b), Q(a), Q(b)
    mv = m.exact if exact else list(m.values)
    mtv = mt.exact if exact else list(mt.values)
    # coefficientwise: -(k+1) m_k = Q(a) P(a)^{k+1} - Q(b) P(b)^{k+1} + mt_{k+1}
    worst = 0.0
    ok = True
    for k in range(K + 1):
        lhs = -(k + 1) * mv[k]
        rhs = Qa * Pa ** (k + 1) - Qb * Pb ** (k + 1) + mtv[k + 1]
        if exact:
            ok &= lhs == rhs
        worst = max(worst, abs(_cx(lhs) - _cx(rhs)))
    mt0_ok = _same(mtv[0], Qb - Qa, scale=abs(_cx(Qb)) + abs(_cx(Qa)))
    # finite differences of H against the right-hand side
    path = _segment_path(a, b)
    Pc = _coeffs(P)
    R = float(np.max(np.abs(polyval(Pc, _sample_path(path, 129)))))
    R = max(R, 1e-3)
    if samples is None:
        samples = [3.0 * R * cmath.exp(1j * (0.4 + 2.1 * j)) for j in range(3)]
    qd = Q.deriv()
    ratio = max(R / abs(complex(t)) for t in samples)
    KK = K if ratio <= 0 else min(120, max(K, int(math.ceil(math.log(1e-17) / math.log(min(ratio, 0.9)))) + 2))
    ms = m.values if KK <= K else poly_moments(P, Q, a, b, KK).values
    fd_worst, ser_worst, rec = 0.0, 0.0, []
    for t in samples:
        t = complex(t)
        h = 1e-3 * abs(t)
        Hs = [_h_direct(P, Q, path, t + s * h)[0] for s in (-2, -1, 1, 2)]
        dH = (Hs[0] - 8 * Hs[1] + 8 * Hs[2] - Hs[3]) / (12 * h)
        Ht, _ = _h_direct(P, Q, path, t, num=qd)
        rhs = _cx(Qa) / (t - _cx(Pa)) - _cx(Qb) / (t - _cx(Pb)) + Ht
        scale = max(1.0, abs(rhs), abs(dH))
        fd = abs(dH - rhs) / scale
        fd_worst = max(fd_worst, fd)
        ser = sum(-(k + 1) * ms[k] * t ** (-k - 2) for k in range(len(ms)))
        sr = abs(ser - rhs) / scale
        ser_worst = max(ser_worst, sr)
        rec.append({"t": t, "dH": complex(dH), "rhs": complex(rhs), "fd": fd, "series": sr})
    ends0 = _same(Qa, 0) and _same(Qb, 0)
    mvan = all(_same(v, 0) for v in mv)
    tvan = all(_same(v, 0) for v in mtv)
    claim = (mvan == tvan) if ends0 else None
    return TildeReport(ok if exact else worst < 1e-9, worst, mtv[0], mt0_ok, fd_worst, ser_worst, ends0, mvan,
                       tvan, claim, rec)


# ---------------------------------------------------------------------------
# branches of P^{-1} near an endpoint


def multiplicity(P: Poly, x) -> int:
    """Order of vanishing of ``P - P(x)`` at ``x``."""
    D = P.deriv()
    m = 1
    while D.degree >= 0 and not D.is_zero():
        v = D(x)
        if _is_exact(v):
            if v != 0:
                return m
        elif abs(_cx(v)) > 1e-10 * max(1.0, max(abs(c) for c in D.to_complex())):
            return m
        m += 1
        D = D.deriv()
    return m


def critical_values(P: Poly) -> np.ndarray:
    Pc = _coeffs(P)
    crit = poly_roots(_coeffs(P.deriv())) if P.degree > 1 else np.zeros(0, complex)
    return np.asarray(polyval(Pc, crit), complex)


def _preimages(Pc: np.ndarray, z: complex) -> np.ndarray:
    c = Pc.copy()
    c[0] -= z
    return poly_roots(c)


def _clusters_ok(roots, a, b, da, db) -> tuple[np.ndarray, np.ndarray] | None:
    ia = np.argsort(np.abs(roots - a))[:da]
    ib = np.argsort(np.abs(roots - b))[:db]
    if set(ia.tolist()) & set(ib.tolist()):
        return None
    sep = abs(a - b) if abs(a - b) > 0 else 1.0
    if np.max(np.abs(roots[ia] - a)) > 0.3 * sep or np.max(np.abs(roots[ib] - b)) > 0.3 * sep:
        return None
    # all other roots must be farther away than the cluster members
    others = np.setdiff1d(np.arange(len(roots)), np.concatenate([ia, ib]))
    if len(others):
        if np.min(np.abs(roots[others] - a)) <= 2 * np.max(np.abs(roots[ia] - a)):
            return None
        if np.min(np.abs(roots[others] - b)) <= 2 * np.max(np.abs(roots[ib] - b)):
            return None
    return ia, ib


def _probe_point(P: Poly, a, b, z0: complex, da: int, db: int, phase: float = 0.37):
    """A regular value ``z*`` near ``z0`` whose preimage clusters near ``a`` and ``b`` are unambiguous."""
    Pc = _coeffs(P)
    cv = critical_values(P)
    far = [abs(v - z0) for v in cv if abs(v - z0) > 1e-9 * max(1.0, abs(z0))]
    scale = max(1.0, float(np.max(np.abs(Pc))))
    rho = 0.25 * min(far) if far else 0.25 * scale
    ac, bc = _cx(a), _cx(b)
    for _ in range(12):
        zs = z0 + rho * cmath.exp(1j * phase)
        roots = _preimages(Pc, zs)
        got = _clusters_ok(roots, ac, bc, da, db)
        if got is not None:
            return zs, roots, got[0], got[1], rho
        rho *= 0.2
    raise TrackingAmbiguity("could not isolate preimage clusters near the endpoints", z0=z0)


@dataclass
class GluingResult:
    glued: bool
    z0: complex
    z_star: complex
    d_a: int
    d_b: int
    jets_a: list
    jets_b: list
    unmatched: list
    max_mismatch: float

    def __bool__(self) -> bool:
        return self.glued

    def to_json(self) -> dict:
        return {"glued": self.glued, "z0": self.z0, "z_star": self.z_star, "d_a": self.d_a, "d_b": self.d_b,
                "jets_a": [list(j) for j in self.jets_a], "jets_b": [list(j) for j in self.jets_b],
                "unmatched": self.unmatched, "max_mismatch": self.max_mismatch}


def _endpoint_image(P: Poly, a, b):
    Pa, Pb = P(a), P(b)
    scale = max(1.0, abs(_cx(Pa)))
    if not _same(Pa, Pb, scale=scale, rel=1e-12):
        raise EndpointImagesDiffer("P(a) != P(b)", Pa=_cx(Pa), Pb=_cx(Pb))
    return Pa


def gluing_test(P, Q, a, b, tol: Tolerances = DEFAULT, order: int | None = None) -> GluingResult:
    """Do the local germs of ``Q(P^{-1})`` from ``a`` and from ``b`` coincide at ``P(a) = P(b)``?"""
    P, Q = as_poly(P), as_poly(Q)
    a, b = as_endpoint(a), as_endpoint(b)
    z0 = _cx(_endpoint_image(P, a, b))
    da, db = multiplicity(P, a), multiplicity(P, b)
    zs, roots, ia, ib, rho = _probe_point(P, a, b, z0, da, db)
    order = tol.jet_order if order is None else order
    f = AlgebraicFunctionDef.composite(P.to_complex(), Q.to_complex(), tol=tol)
    r = 0.5 * rho

    def scaled(x):
        jet = germ_from_sheet(f, zs, x, order).jet
        return np.asarray(jet, complex) * r ** np.arange(len(jet))

    ja = [scaled(x) for x in roots[ia]]
    jb = [scaled(x) for x in roots[ib]]
    scale = max(1.0, max(float(np.max(np.abs(j))) for j in ja + jb))
    thr = max(tol.eps_jet, 1e-10) * scale

    def distinct(js):
        out = []
        for j in js:
            if not any(np.max(np.abs(j - k)) <= thr for k in out):
                out.append(j)
        return out

    ua, ub = distinct(ja), distinct(jb)
    unmatched, worst = [], 0.0
    for side, src, dst in (("a", ua, ub), ("b", ub, ua)):
        for i, j in enumerate(src):
            d = min(float(np.max(np.abs(j - k))) for k in dst)
            worst = max(worst, d)
            if d > thr:
                unmatched.append({"side": side, "index": i, "distance": d})
    glued = not unmatched
    return GluingResult(glued, z0, zs, da, db, [list(map(complex, j)) for j in ja],
                        [list(map(complex, j)) for j in jb], unmatched, worst / scale)


# ---------------------------------------------------------------------------
# composition factors


@dataclass
class PCCResult:
    outer_p: Poly
    outer_q: Poly
    W: Poly

    def to_json(self) -> dict:
        return {"P_tilde": self.outer_p.to_json(), "Q_tilde": self.outer_q.to_json(), "W": self.W.to_json()}


def common_right_factors(P, Q) -> list[PCCResult]:
    """All common right factors ``W`` (monic, ``W(0)=0``, degree at least 2), largest first."""
    P, Q = as_poly(P), as_poly(Q)
    out = []
    for dec in right_factors(P, proper=False):
        if dec.inner.degree < 2:
            continue
        Qt = Poly([Q.c[0]]) if Q.degree <= 0 else factor_through(Q, dec.inner)
        if Qt is not None:
            out.append(PCCResult(dec.outer, Qt, dec.inner))
    out.sort(key=lambda r: -r.W.degree)
    return out


def decompose_pcc(P, Q, a, b) -> PCCResult | None:
    """Largest common right factor ``W`` of ``P`` and ``Q`` with ``W(a) = W(b)``, or None."""
    a, b = as_endpoint(a), as_endpoint(b)
    for r in common_right_factors(P, Q):
        Wa, Wb = r.W(a), r.W(b)
        if _same(Wa, Wb, scale=abs(_cx(Wa)), rel=1e-10):
            return r
    return None


# ---------------------------------------------------------------------------
# definiteness evidence


@dataclass
class DefinitenessReport:
    z0: complex
    property_e: bool | None
    depth_of_gamma: int | None
    z0_simple: bool
    nu: int | None
    crossings: int | None
    depth_upper_bound: int | None
    conditions: dict
    reasons: list
    refutation: dict | None = None

    def to_json(self) -> dict:
        return {"z0": self.z0, "property_e": "unknown" if self.property_e is None else self.property_e,
                "depth_of_gamma": self.depth_of_gamma, "z0_simple": self.z0_simple, "nu": self.nu,
                "crossings": self.crossings, "depth_upper_bound": self.depth_upper_bound,
                "conditions": self.conditions, "reasons": self.reasons, "refutation": self.refutation}


def _is_real_poly(P: Poly) -> bool:
    return all(not isinstance(c, QSqrt) or not c.b or c.d > 0 for c in P.c)


def _is_real(x) -> bool:
    if isinstance(x, QSqrt):
        return not x.b or x.d > 0
    if _is_exact(x):
        return True
    return False


def _sturm_ready(P: Poly, a, b) -> bool:
    return _is_real_poly(P) and _is_real(a) and _is_real(b) and P.is_rational()


def _regular_value(P: Poly, z0) -> bool:
    g = poly_gcd(P - z0, P.deriv())
    return g.degree == 0


def _simple_real_zeros(P: Poly, a, b) -> bool | None:
    if not (_sturm_ready(P, a, b) and P(a) == 0 and P(b) == 0 and a < b):
        return None
    g = poly_gcd(P, P.deriv())
    return sturm_count(g, a, b) == 0 if g.degree > 0 else True


def _fixed_sign(P: Poly, a, b) -> int | None:
    if not (_sturm_ready(P, a, b) and P(a) == 0 and P(b) == 0 and a < b):
        return None
    if sturm_count(P, a, b) != 0:
        return 0
    v = P((a + b) / 2)
    return 1 if v > 0 else -1


def _coefficient_cone(P: Poly, a, b) -> bool | None:
    if not (_is_real(a) and _is_real(b) and _is_exact(a) and _is_exact(b)):
        return None
    if not (0 <= a < b):
        return None
    div = Poly([-a, 1]) * Poly([b, -1])
    P1, r = P.divmod(div)
    if not r.is_zero():
        return None
    cs = [complex(c) for c in P1.c]
    if any(c == 0 for c in cs):
        return False
    ang = sorted(cmath.phase(c) for c in cs)
    gaps = [ang[i + 1] - ang[i] for i in range(len(ang) - 1)] + [2 * math.pi - (ang[-1] - ang[0])]
    return max(gaps) > math.pi + 1e-12


def crossing_bound(P: Poly, z0: complex, gamma: PiecewisePath, Gamma: PiecewisePath,
                   angles: Sequence[float] = (math.pi / 2, math.pi / 2 + 0.05, math.pi / 2 - 0.05, 1.1, 2.0),
                   tol: Tolerances = DEFAULT) -> tuple[int, int, float]:
    """``(nu, r, angle)``: crossings of a ray from far away down to ``z0`` and how many land singular."""
    Pc = _coeffs(P)
    cv = critical_values(P)
    f = AlgebraicFunctionDef.composite(Pc, [0, 1], tol=tol)
    zs = _sample_path(gamma, 65)
    reach = float(np.max(np.abs(zs - z0)))
    others = [abs(v - z0) for v in cv if abs(v - z0) > 1e-9 * max(1.0, abs(z0))]
    roots0 = _preimages(Pc, z0)
    mult = _root_multiplicities(roots0)
    last_err: Exception | None = None
    for th in angles:
        u = cmath.exp(1j * th)
        top = z0 + (1.5 * reach + 1.0) * u
        rho = 1e-3 * max(reach, 1e-6)
        if others:
            rho = min(rho, 0.5 * min(others))
        try:
            for _ in range(3):
                S = PiecewisePath.segment(top, z0 + rho * u)
                cr = crossing_sequence(S, gamma, forbidden=cv, tol=tol)
                low = [abs(c.point - z0) for c in cr]
                if not low or min(low) > 2 * rho:
                    break
                rho = 0.25 * min(low)
            d = z0 + rho * u
            singular = 0
            for c in cr:
                seg = gamma.segments[c.piece_b]
                x0 = complex(seg.sheet(c.s_b)) if isinstance(seg, MappedSegment) else None
                if x0 is None:
                    raise ExactUnavailable("crossing bound needs a pushforward curve")
                y, _ = track_segment(f, LineSegment(c.point, d), x0, 0.0, 1.0, tol)
                x = _descend(Pc, z0, d, complex(y))
                k = int(np.argmin(np.abs(roots0 - x)))
                if mult[k] > 1:
                    singular += 1
            return singular, len(cr), th
        except (NotAdmissible, PathTooClose, TrackingAmbiguity) as e:
            last_err = e
            continue
    raise last_err if last_err else NotAdmissible("no admissible ray found")


def _root_multiplicities(roots: np.ndarray, rel: float = 1e-5) -> list[int]:
    scale = max(1.0, float(np.max(np.abs(roots)))) if len(roots) else 1.0
    out = []
    for r in roots:
        out.append(int(np.sum(np.abs(roots - r) <= rel * scale ** 1)))
    return out


def _descend(Pc: np.ndarray, z0: complex, d: complex, x: complex, q: float = 0.5) -> complex:
    """Follow a preimage of ``P`` along the straight line from ``d`` to ``z0``."""
    dPc = np.polynomial.polynomial.polyder(Pc)
    h = d - z0
    floor = 1e-13 * max(1.0, abs(h))
    while abs(h) > floor:
        h *= q
        z = z0 + h
        for _ in range(30):
            fx = polyval(Pc, x) - z
            dx = polyval(dPc, x)
            if dx == 0:
                break
            step = fx / dx
            x -= step
            if abs(step) < 1e-15 * max(1.0, abs(x)):
                break
    return x


def definiteness_evidence(P, a, b, Gamma: PiecewisePath | None = None, witness_q=None, K: int = 20,
                          tol: Tolerances = DEFAULT) -> DefinitenessReport:
    """Depth of ``P(a)`` on ``P(Gamma)``, the crossing bound, and algebraic sufficient conditions."""
    P = as_poly(P)
    a, b = as_endpoint(a), as_endpoint(b)
    z0x = _endpoint_image(P, a, b)
    z0 = _cx(z0x)
    if Gamma is None:
        Gamma = bowed_arc(a, b)
    Pc = _coeffs(P)
    asg_gamma = PiecewisePath([MappedSegment(Pc, s) for s in Gamma.segments], None, tol)
    part = build_partition(asg_gamma, tol)
    depth, _ = point_depth(part, z0)
    # other preimages of z0 on Gamma make z0 a multiple point of gamma
    roots0 = _preimages(Pc, z0)
    ac, bc = _cx(a), _cx(b)
    lim = 1e-7 * max(1.0, Gamma.diameter)
    extra = [r for r in roots0 if min(abs(r - ac), abs(r - bc)) > 1e-6 and Gamma.distance(r) <= lim]
    simple = not extra
    conditions: dict[str, Any] = {}
    reasons: list[str] = []
    if _is_exact(z0x):
        conditions["regular_value"] = _regular_value(P, z0x)
    else:
        conditions["regular_value"] = bool(all(m == 1 for m in _root_multiplicities(roots0)))
    conditions["simple_real_zeros"] = _simple_real_zeros(P, a, b) if _is_exact(z0x) and z0x == 0 else None
    sign = _fixed_sign(P, a, b) if _is_exact(z0x) and z0x == 0 else None
    conditions["fixed_sign_on_interval"] = None if sign is None else sign != 0
    conditions["coefficient_cone"] = _coefficient_cone(P, a, b) if _is_exact(z0x) and z0x == 0 else None
    conditions["exterior_simple_endpoint"] = bool(depth == 0 and simple)
    nu = r = None
    try:
        nu, r, _ = crossing_bound(P, z0, asg_gamma, Gamma, tol=tol)
        conditions["crossing_bound_zero"] = nu == 0
    except (NotAdmissible, PathTooClose, TrackingAmbiguity, ExactUnavailable) as e:
        conditions["crossing_bound_zero"] = None
        reasons.append(f"crossing bound unavailable: {e}")
    for k, v in conditions.items():
        if v:
            reasons.append(k)
    prop = True if any(conditions.values()) else None
    refutation = None
    if witness_q is not None:
        Q = as_poly(witness_q)
        ms = poly_moments(P, Q, a, b, K)
        vanish = all(abs(v) == 0 for v in ms.values) if ms.method == "exact" else \
            bool(np.all(np.abs(ms.values) < 1e-20))
        pcc = decompose_pcc(P, Q, a, b)
        refutation = {"moments_vanish": vanish, "composition": pcc is not None}
        if vanish and pcc is None:
            if prop:
                reasons.append("inconsistent: witness contradicts a matched sufficient condition")
            prop = False
            reasons.append("witness Q has vanishing moments without a closing composition factor")
    ub = depth if nu is None else min(depth, nu)
    if prop is False:
        ub = depth
    return DefinitenessReport(z0, prop, depth, simple, nu, r, ub, conditions, reasons, refutation)


# ---------------------------------------------------------------------------
# rational functions and the double moment problem


class RationalFunction:
    """``num / den`` with exact coefficients."""

    def __init__(self, num, den=None):
        self.num = as_poly(num)
        self.den = as_poly(den if den is not None else [1])
        if self.den.is_zero():
            raise SchemaError("zero denominator")
        g = poly_gcd(self.num, self.den) if not self.num.is_zero() else Poly([1])
        if g.degree > 0:
            self.num, _ = self.num.divmod(g)
            self.den, _ = self.den.divmod(g)
        lc = self.den.lead
        self.num = self.num * (1 / Fraction(lc) if not isinstance(lc, QSqrt) else QSqrt(1) / lc)
        self.den = self.den.monic()

    @classmethod
    def parse(cls, v) -> "RationalFunction":
        if isinstance(v, RationalFunction):
            return v
        if isinstance(v, dict):
            return cls(v.get("num", v.get("coeffs")), v.get("den"))
        return cls(v)

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    def deriv(self) -> "RationalFunction":
        return RationalFunction(self.num.deriv() * self.den - self.num * self.den.deriv(), self.den * self.den)

    def __call__(self, x):
        if _is_exact(x) and not isinstance(x, complex):
            return self.num(x) / self.den(x)
        return polyval(_coeffs(self.num), x) / polyval(_coeffs(self.den), x)

    def poles(self) -> list:
        """Finite poles plus ``None`` for a pole at infinity."""
        out: list = [complex(p) for p in poly_roots(_coeffs(self.den))] if self.den.degree > 0 else []
        if self.num.degree > self.den.degree:
            out.append(None)
        return out

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}


@dataclass
class DoubleMomentReport:
    grid: np.ndarray
    errors: np.ndarray
    method: str
    closed: bool
    vanishing: bool
    d_a: int | None = None
    d_b: int | None = None
    relation: dict | None = None
    coincident_pair: list | None = None
    factor: PCCResult | None = None
    pole_side: dict | None = None
    one_sided: dict | None = None
    endpoint_check: dict | None = None
    verdict: str = ""
    consistent: bool = True
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"grid": [[[complex(v).real, complex(v).imag] for v in row] for row in self.grid],
                "errors": self.errors.tolist(), "method": self.method, "closed": self.closed,
                "vanishing": self.vanishing, "d_a": self.d_a, "d_b": self.d_b, "relation": self.relation,
                "coincident_pair": self.coincident_pair,
                "factor": self.factor.to_json() if self.factor else None, "pole_side": self.pole_side,
                "one_sided": self.one_sided, "endpoint_check": self.endpoint_check, "verdict": self.verdict,
                "consistent": self.consistent, "notes": self.notes}


def _grid_exact(P: Poly, Q: Poly, a, b, closed: bool, I: int, J: int):
    if closed:
        return np.zeros((I + 1, J + 1), complex), np.zeros((I + 1, J + 1)), "exact"
    p = P.deriv()
    vals = np.zeros((I + 1, J + 1), complex)
    errs = np.zeros((I + 1, J + 1))
    method = "exact"
    Qj = Poly([1])
    for j in range(J + 1):
        g = Qj * p
        for i in range(I + 1):
            v, ok = _exact_diff(g.antideriv(), a, b)
            vals[i, j] = _cx(v)
            if not ok:
                method = "numeric50"
                errs[i, j] = MP_TOL * max(1.0, abs(vals[i, j]))
            g = g * P
        Qj = Qj * Q
    return vals, errs, method


def _grid_quadrature(P: RationalFunction, Q: RationalFunction, Gamma: PiecewisePath, I: int, J: int, tol_abs):
    Pn, Pd = _coeffs(P.num), _coeffs(P.den)
    Qn, Qd = _coeffs(Q.num), _coeffs(Q.den)
    dP = P.deriv()
    dn, dd = _coeffs(dP.num), _coeffs(dP.den)

    def fn(x):
        pv = polyval(Pn, x) / polyval(Pd, x)
        qv = polyval(Qn, x) / polyval(Qd, x)
        dv = polyval(dn, x) / polyval(dd, x)
        ip = pv[None, :] ** np.arange(I + 1)[:, None]
        jq = qv[None, :] ** np.arange(J + 1)[:, None]
        return (ip[:, None, :] * jq[None, :, :]) * dv

    vals, err = path_integral(Gamma, fn, tol_abs)
    return np.asarray(vals, complex), np.full((I + 1, J + 1), max(err, tol_abs)), "quadrature"


def _preimages_rational(P: RationalFunction, z: complex) -> np.ndarray:
    n, d = _coeffs(P.num), _coeffs(P.den)
    m = max(len(n), len(d))
    c = np.zeros(m, complex)
    c[: len(n)] += n
    c[: len(d)] -= z * d
    return poly_roots(c)


def _newton_rational(P: RationalFunction, z: complex, x: complex) -> complex:
    n, d = _coeffs(P.num), _coeffs(P.den)
    dn, dd = np.polynomial.polynomial.polyder(n), np.polynomial.polynomial.polyder(d)
    for _ in range(40):
        F = polyval(n, x) - z * polyval(d, x)
        Fx = polyval(dn, x) - z * polyval(dd, x)
        if Fx == 0:
            break
        s = F / Fx
        x -= s
        if abs(s) < 1e-15 * max(1.0, abs(x)):
            break
    return x


def _rational_probe(P: RationalFunction, a: complex, b: complex, z0: complex, da: int, db: int):
    crit_vals = []
    dP = P.deriv()
    if dP.num.degree > 0:
        for c in poly_roots(_coeffs(dP.num)):
            if abs(polyval(_coeffs(P.den), c)) > 1e-12:
                crit_vals.append(complex(P(c)))
    far = [abs(v - z0) for v in crit_vals if abs(v - z0) > 1e-9 * max(1.0, abs(z0))]
    rho = 0.25 * min(far) if far else 0.25 * max(1.0, abs(z0))
    for _ in range(12):
        zs = z0 + rho * cmath.exp(0.37j)
        roots = _preimages_rational(P, zs)
        got = _clusters_ok(roots, a, b, da, db)
        if got is not None:
            return zs, roots, got[0], got[1], rho
        rho *= 0.2
    raise TrackingAmbiguity("could not isolate preimage clusters", z0=z0)


def _mult_rational(P: RationalFunction, x) -> int:
    """Multiplicity of ``x`` as a root of ``num - P(x) den``."""
    if _is_exact(x):
        z = P(x)
        G = P.num - P.den * z
        m = 0
        while not G.is_zero() and G(x) == 0:
            m += 1
            G = G.deriv()
        return max(m, 1)
    n, d = _coeffs(P.num), _coeffs(P.den)
    z = complex(P(complex(x)))
    G = np.zeros(max(len(n), len(d)), complex)
    G[: len(n)] += n
    G[: len(d)] -= z * d
    thr = 1e-9 * max(1.0, float(np.max(np.abs(G))))
    m = 0
    while len(G) > 1 and abs(polyval(G, complex(x))) <= thr * max(1.0, abs(complex(x))) ** len(G):
        m += 1
        G = np.polynomial.polynomial.polyder(G)
    return max(m, 1)


def _pole_side(Pt: RationalFunction, Qt: RationalFunction, loop: PiecewisePath) -> dict:
    poles = []
    for F, name in ((Pt, "P"), (Qt, "Q")):
        for p in F.poles():
            poles.append((name, p))
    mus = []
    for name, p in poles:
        mu = 0 if p is None else winding_number(loop, p)
        mus.append({"function": name, "pole": "inf" if p is None else [p.real, p.imag], "mu": mu})
    one = len({m["mu"] for m in mus}) <= 1
    return {"poles": mus, "one_side": one}


def _closing_loop(W: Poly, Gamma: PiecewisePath, tol: Tolerances) -> PiecewisePath:
    if W.degree == 1 and W.c[1] == 1 and W.c[0] == 0:
        return Gamma
    Wc = _coeffs(W)
    return PiecewisePath([MappedSegment(Wc, s) for s in Gamma.segments], True, tol)


def _monodromy_of(P: RationalFunction, tol: Tolerances):
    n, d = _coeffs(P.num), _coeffs(P.den)
    m = max(len(n), len(d))
    A = np.zeros((2, m), complex)
    A[0, : len(n)] = n
    A[1, : len(d)] = -d
    f = AlgebraicFunctionDef.explicit(A, tol=tol)
    pts = list(f.discriminant_points)
    cen = complex(np.mean(pts)) if pts else 0j
    R = max([abs(p - cen) for p in pts] + [1.0])
    base = cen + 1.7 * R * cmath.exp(-0.61j)
    return monodromy_generators(f, base, tol=tol)


def double_moment_analysis(P, Q, Gamma: PiecewisePath | None = None, I: int = 6, J: int = 6, a=None, b=None,
                           tol: Tolerances = DEFAULT) -> DoubleMomentReport:
    """``m_{i,j} = int P^i Q^j P' dx`` with the composition and pole-side diagnostics."""
    Pr, Qr = RationalFunction.parse(P), RationalFunction.parse(Q)
    if a is not None or b is not None:
        a, b = as_endpoint(a), as_endpoint(b)
    if Gamma is None:
        if a is None:
            raise SchemaError("either Gamma or endpoints a, b are required")
        Gamma = _segment_path(a, b)
    if a is None:
        a, b = Gamma.start, Gamma.end
    closed = bool(Gamma.closed)
    for F in (Pr, Qr):
        for p in F.poles():
            if p is not None and Gamma.distance(p) <= 1e-9 * max(1.0, Gamma.diameter):
                from .errors import PoleOnCurve
                raise PoleOnCurve("pole on the integration path", pole=p)
    poly = Pr.is_polynomial and Qr.is_polynomial
    notes: list[str] = []
    if poly:
        Pp = Pr.num * (1 / Fraction(Pr.den.c[0]) if not isinstance(Pr.den.c[0], QSqrt) else QSqrt(1) / Pr.den.c[0])
        Qp = Qr.num * (1 / Fraction(Qr.den.c[0]) if not isinstance(Qr.den.c[0], QSqrt) else QSqrt(1) / Qr.den.c[0])
        grid, errs, method = _grid_exact(Pp, Qp, a, b, closed, I, J)
    else:
        Pp = Qp = None
        grid, errs, method = _grid_quadrature(Pr, Qr, Gamma, I, J, 1e-13)
    if method == "exact":
        zero = grid == 0
    else:
        mag = _grid_magnitude(Pr, Qr, Gamma, I, J)
        zero = np.abs(grid) <= np.maximum(100 * errs, 1e-10 * mag)
    vanishing = bool(zero.all())
    rep = DoubleMomentReport(grid, errs, method, closed, vanishing, notes=notes)

    if closed:
        W = Poly([0, 1])
        Pt, Qt = Pr, Qr
        if poly:
            cr = common_right_factors(Pp, Qp)
            if cr:
                rep.factor = cr[0]
                W, Pt, Qt = cr[0].W, RationalFunction(cr[0].outer_p), RationalFunction(cr[0].outer_q)
        else:
            notes.append("composition factors are searched for polynomial inputs only")
        loop = _closing_loop(W, Gamma, tol)
        rep.pole_side = _pole_side(Pt, Qt, loop)
        one = rep.pole_side["one_side"]
        rep.verdict = "poles on one side" if one else "poles on both sides"
        rep.consistent = one == vanishing
        return rep

    ac, bc = _cx(a), _cx(b)
    da, db = _mult_rational(Pr, a), _mult_rational(Pr, b)
    rep.d_a, rep.d_b = da, db
    jmax = da + db - 1
    low = bool(zero[:, 1: min(J, jmax) + 1].all()) if J >= 1 else True
    Pa, Pb = Pr(a), Pr(b)
    same_image = _same(Pa, Pb, scale=abs(_cx(Pa)), rel=1e-10)
    if low:
        Qa, Qb = Qr(a), Qr(b)
        rep.endpoint_check = {"P_equal": same_image, "Q_equal": _same(Qa, Qb, scale=abs(_cx(Qa)), rel=1e-10),
                              "checked_columns": min(J, jmax)}
        if J < jmax:
            notes.append("grid has fewer columns than the multiplicity bound; endpoint check is conditional")
        rep.relation = _relation_check(Pr, Qr, ac, bc, da, db, same_image)
        rep.coincident_pair = _coincident_pairs(Pr, Qr, ac, bc, _cx(Pa), da, db)
        if poly:
            rep.factor = decompose_pcc(Pp, Qp, a, b)
            if rep.factor is not None:
                Pt, Qt = RationalFunction(rep.factor.outer_p), RationalFunction(rep.factor.outer_q)
                loop = _closing_loop(rep.factor.W, Gamma, tol) if not _only_infinite(Pt, Qt) else None
                rep.pole_side = {"poles": [{"function": "P", "pole": "inf", "mu": 0}], "one_side": True} \
                    if loop is None else _pole_side(Pt, Qt, loop)
        else:
            notes.append("composition factors are searched for polynomial inputs only")
    # one-sided moments with a doubly transitive monodromy group
    col = bool(zero[:, 1].all()) if J >= 1 else False
    if col and Pr.degree >= 2:
        try:
            mono = _monodromy_of(Pr, tol)
            dt = bool(mono.doubly_transitive)
        except Exception as e:  # tracking failures only downgrade the report
            dt = None
            notes.append(f"monodromy unavailable: {e}")
        if dt:
            through = None
            if poly:
                through = adic_digits(Qp, Pp) is not None
            rep.one_sided = {"doubly_transitive": True, "P_equal": same_image, "Q_through_P": through,
                             "holds": bool(same_image and through is not False)}
        else:
            rep.one_sided = {"doubly_transitive": dt}
    if vanishing:
        if rep.factor is not None and rep.pole_side and rep.pole_side["one_side"]:
            rep.verdict = "composition closes the path; poles on one side"
        elif rep.factor is not None:
            rep.verdict = "composition closes the path; poles on both sides"
            rep.consistent = False
        else:
            rep.verdict = "vanishing without an extracted factor"
            rep.consistent = not poly
    else:
        rep.verdict = "moments do not vanish"
        if poly:
            f = decompose_pcc(Pp, Qp, a, b)
            rep.consistent = f is None
    if rep.endpoint_check is not None:
        rep.consistent &= bool(rep.endpoint_check["P_equal"] and rep.endpoint_check["Q_equal"])
    if rep.one_sided and rep.one_sided.get("doubly_transitive"):
        rep.consistent &= rep.one_sided["holds"]
    return rep


def _only_infinite(Pt: RationalFunction, Qt: RationalFunction) -> bool:
    return all(p is None for p in Pt.poles() + Qt.poles())


def _grid_magnitude(P: RationalFunction, Q: RationalFunction, Gamma: PiecewisePath, I: int, J: int) -> float:
    xs = _sample_path(Gamma, 129)
    pv, qv = np.abs(P(xs)), np.abs(Q(xs))
    dv = np.abs(P.deriv()(xs))
    L = float(np.sum(np.abs(np.diff(xs))))
    return float(np.max(np.maximum(1.0, pv) ** I * np.maximum(1.0, qv) ** J * dv)) * max(L, 1e-12)


def _relation_check(P: RationalFunction, Q: RationalFunction, a: complex, b: complex, da: int, db: int,
                    same_image: bool) -> dict:
    jmax = da + db - 1
    if same_image:
        z0 = complex(P(a))
        zs, roots, ia, ib, rho = _rational_probe(P, a, b, z0, da, db)
        res = []
        for j in range(jmax + 1):
            sa = np.sum(Q(roots[ia]) ** j)
            sb = np.sum(Q(roots[ib]) ** j)
            scale = max(1.0, float(np.max(np.abs(Q(roots[np.concatenate([ia, ib])])))) ** j)
            res.append(float(abs(db * sa - da * sb)) / scale)
        return {"form": "equal images", "residuals": res, "holds": max(res) < 1e-7}
    res = []
    for x, d in ((a, da), (b, db)):
        z0 = complex(P(x))
        zs, roots, ia, _, _ = _single_probe(P, x, z0, d)
        for j in range(1, jmax + 1):
            s = np.sum(Q(roots[ia]) ** j)
            scale = max(1.0, float(np.max(np.abs(Q(roots[ia]))))) ** j
            res.append(float(abs(s)) / scale)
    return {"form": "distinct images", "residuals": res, "holds": max(res) < 1e-7 if res else True}


def _single_probe(P: RationalFunction, x: complex, z0: complex, d: int):
    rho = 1e-2 * max(1.0, abs(z0))
    for _ in range(10):
        zs = z0 + rho * cmath.exp(0.37j)
        roots = _preimages_rational(P, zs)
        idx = np.argsort(np.abs(roots - x))
        ia = idx[:d]
        rest = idx[d:]
        if not len(rest) or np.min(np.abs(roots[rest] - x)) > 3 * np.max(np.abs(roots[ia] - x)):
            return zs, roots, ia, None, rho
        rho *= 0.2
    raise TrackingAmbiguity("could not isolate preimages", point=x)


def _coincident_pairs(P: RationalFunction, Q: RationalFunction, a: complex, b: complex, z0: complex,
                      da: int, db: int) -> list:
    """Branch pairs ``(i, j)`` with ``Q(P_i^{-1}) = Q(P_j^{-1})`` near a regular value close to ``z0``."""
    try:
        zs, roots, ia, ib, rho = _rational_probe(P, a, b, z0, da, db)
    except TrackingAmbiguity:
        zs, roots, ia, _, rho = _single_probe(P, a, z0, da)
    n = len(roots)
    seps = np.abs(roots[:, None] - roots[None, :]) + np.eye(n) * 1e300
    r = 0.1 * rho
    samples = [zs + r * cmath.exp(2j * math.pi * k / 7) for k in range(7)]
    vals = np.zeros((n, len(samples) + 1), complex)
    vals[:, 0] = Q(roots)
    for k, z in enumerate(samples):
        for i in range(n):
            vals[i, k + 1] = Q(_newton_rational(P, z, roots[i]))
    scale = max(1.0, float(np.max(np.abs(vals))))
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if np.max(np.abs(vals[i] - vals[j])) <= 1e-8 * scale:
                pairs.append([i, j])
    return pairs
