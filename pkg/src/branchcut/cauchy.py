"""Cauchy-type integrals of algebraic functions along piecewise curves.

``I(t) = (1/2 pi i) * integral over gamma of g(z) dz / (z - t)``.

Each piece of the curve carries its own branch, fixed by a seed value at the
piece midpoint and continued outward.  Near a ramified end of cycle length
``n`` the half-piece is reparametrised by ``s = v**n / 2`` so the integrand is
smooth in ``v``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebraic import (
    AlgebraicFunctionDef,
    BranchGerm,
    MappedSegment,
    _cluster_means,
    jet_at,
    local_radius,
    polyval,
    poly_roots,
    ramification_profile,
    s_div,
    taylor_shift,
    track_segment,
)
from .config import DEFAULT, Tolerances
from .errors import (
    ModelMismatch,
    NotClosed,
    PathTooClose,
    PointOnCurve,
    PoleOnCurve,
    QuadratureNotConverged,
    SchemaError,
)
from .paths import (
    ArcSegment,
    DomainPartition,
    PiecewisePath,
    Segment,
    _gl_nodes,
    crossing_sequence,
    junction_points,
    self_intersections,
    winding_number,
)

TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# half-piece parametrisation


class _Half:
    """Half of a piece, ``v in [0, 1]`` with ``v = 0`` at the piece end ``e``."""

    def __init__(self, seg: Segment, end: int, n: int):
        self.seg, self.end, self.n = seg, end, n

    def s(self, v):
        v = np.asarray(v, float)
        return 0.5 * v ** self.n if self.end == 0 else 1.0 - 0.5 * v ** self.n

    def ds(self, v):
        v = np.asarray(v, float)
        d = 0.5 * self.n * v ** (self.n - 1)
        return d if self.end == 0 else -d

    def v_of_s(self, s):
        s = np.asarray(s, float)
        u = 2 * s if self.end == 0 else 2 * (1 - s)
        return np.clip(u, 0, None) ** (1.0 / self.n)

    def point(self, v):
        return self.seg.point(self.s(v))

    def deriv(self, v):
        return self.seg.deriv(self.s(v)) * self.ds(v)


class PieceBranch:
    """The branch carried by one piece, evaluable anywhere on the piece."""

    def __init__(self, f: AlgebraicFunctionDef, seg: Segment, seed: complex, tol: Tolerances):
        self.f, self.seg, self.tol = f, seg, tol
        ys = f.sheets(complex(seg.point(0.5)))[0]
        self.seed = complex(ys[np.argmin(np.abs(ys - seed))])
        self.exact = (f.kind == "composite" and isinstance(seg, MappedSegment) and len(seg.P) == len(f.P)
                      and np.allclose(seg.P, f.P))
        self.halves = [None, None]
        self.tables = [None, None]
        self.singular = [False, False]
        self._cache: dict = {}
        for e in (0, 1):
            self._setup(e)

    # -- setup ------------------------------------------------------------
    def _setup(self, e: int) -> None:
        f, seg = self.f, self.seg
        if self.exact or f.n == 1:
            self.halves[e] = _Half(seg, e, 1)
            if f.n == 1:
                z0 = complex(seg.point(e))
                lead = f.sheet_coeffs(z0)[0]
                if abs(lead[-1]) <= 1e-12 * max(1.0, float(np.max(np.abs(lead)))):
                    raise PoleOnCurve("pole of g on the curve", point=z0)
            return
        z0 = complex(seg.point(e))
        disc = f.discriminant_points
        scale = 1.0 + abs(z0)
        dist = float(np.min(np.abs(disc - z0))) if len(disc) else math.inf
        singular = dist <= 1e-7 * scale
        self.singular[e] = singular
        if not singular:
            h = _Half(seg, e, 1)
            _, rec = track_segment(f, h, self.seed, 1.0, 0.0, self.tol, record=True)
            self.halves[e], self.tables[e] = h, _table(rec)
            return
        if abs(f.sheet_coeffs(z0)[0][-1]) <= 1e-12 * max(1.0, float(np.max(np.abs(f.sheet_coeffs(z0)[0])))):
            raise PoleOnCurve("leading coefficient vanishes at a curve endpoint", point=z0)
        # cycle length of the branch at the singular end
        zm = complex(seg.point(0.5))
        rho = min(local_radius(f, z0), 0.5 * abs(zm - z0))
        h1 = _Half(seg, e, 1)
        y1, rec = track_segment(f, h1, self.seed, 1.0, 0.0, self.tol, record=True, stop_point=z0,
                                stop_radius=rho)
        zs = complex(h1.point(rec[-1][0]))
        n = cycle_length(f, z0, zs, y1, self.tol)
        h = _Half(seg, e, n)
        stop = 1e-11 * scale
        _, rec = track_segment(f, h, self.seed, 1.0, 0.0, self.tol, record=True, stop_point=z0,
                               stop_radius=stop)
        self.halves[e], self.tables[e] = h, _table(rec)

    # -- evaluation ---------------------------------------------------------
    def sheet_v(self, e: int, v) -> np.ndarray:
        v = np.atleast_1d(np.asarray(v, float))
        h = self.halves[e]
        if self.exact:
            return np.asarray(self.seg.sheet(h.s(v)), complex)
        z = np.atleast_1d(h.point(v))
        if self.f.n == 1:
            return self.f.sheets(z)[:, 0]
        V, Y = self.tables[e]
        pred = _interp(V, Y, v)
        ys = self.f.sheets(z)
        k = np.argmin(np.abs(ys - pred[:, None]), axis=1)
        return ys[np.arange(len(v)), k]

    def sheet_s(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, float))
        out = np.zeros(len(s), complex)
        left = s <= 0.5
        if left.any():
            out[left] = self.sheet_v(0, self.halves[0].v_of_s(s[left]))
        if (~left).any():
            out[~left] = self.sheet_v(1, self.halves[1].v_of_s(s[~left]))
        return out

    def value_s(self, s) -> np.ndarray:
        return self.f.value(self.sheet_s(s))

    def nodes(self, e: int, a: float, b: float, order: int = 16):
        key = (e, a, b)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        x, wts = _gl_nodes(order)
        v = 0.5 * (b - a) * x + 0.5 * (b + a)
        h = self.halves[e]
        z = np.atleast_1d(h.point(v)).astype(complex)
        dz = np.atleast_1d(h.deriv(v)).astype(complex)
        w = self.f.value(self.sheet_v(e, v))
        # the right half runs backwards in v
        sign = 1.0 if e == 0 else -1.0
        out = (z, sign * dz * wts * 0.5 * (b - a), w, np.abs(dz) * wts * 0.5 * (b - a))
        if len(self._cache) < 200000:
            self._cache[key] = out
        return out


def _table(rec):
    V = np.array([r[0] for r in rec], float)
    Y = np.array([r[1] for r in rec], complex)
    order = np.argsort(V)
    return V[order], Y[order]


def _interp(V: np.ndarray, Y: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.interp(v, V, Y.real) + 1j * np.interp(v, V, Y.imag)
    lo = v < V[0]
    if lo.any() and len(V) >= 2:
        slope = (Y[1] - Y[0]) / (V[1] - V[0])
        out[lo] = Y[0] + slope * (v[lo] - V[0])
    return out


def cycle_length(f: AlgebraicFunctionDef, z0: complex, zs: complex, ys: complex, tol: Tolerances) -> int:
    """How many turns around ``z0`` (through ``zs``) bring sheet ``ys`` back."""
    r = abs(zs - z0)
    th = cmath.phase(zs - z0)
    M = 16
    arcs = [ArcSegment(z0, r, th + 2 * math.pi * k / M, 2 * math.pi / M) for k in range(M)]
    y = complex(ys)
    sheets = f.sheets(zs)[0]
    i0 = int(np.argmin(np.abs(sheets - y)))
    for turn in range(1, f.n + 1):
        for a in arcs:
            y, _ = track_segment(f, a, y, 0.0, 1.0, tol)
        if int(np.argmin(np.abs(sheets - y))) == i0:
            return turn
    return f.n


# ---------------------------------------------------------------------------
# integrand assignment


class IntegrandAssignment:
    """A curve together with the branch of ``g`` chosen on each piece.

    Parameters
    ----------
    gamma : PiecewisePath
    funcs : AlgebraicFunctionDef or sequence of them (one per piece)
    seeds : sheet values at the piece midpoints (snapped to the nearest sheet)
    """

    def __init__(self, gamma: PiecewisePath, funcs, seeds: Sequence[complex], tol: Tolerances | None = None,
                 extra_sigma: Sequence[complex] = ()):
        self.gamma = gamma
        self.tol = tol or gamma.tol
        if isinstance(funcs, AlgebraicFunctionDef):
            funcs = [funcs] * len(gamma.segments)
        if len(funcs) != len(gamma.segments) or len(seeds) != len(gamma.segments):
            raise SchemaError("one function and one seed per piece are required")
        self.funcs = list(funcs)
        self.pieces = [PieceBranch(f, seg, s, self.tol) for f, seg, s in zip(self.funcs, gamma.segments, seeds)]
        self.seeds = [p.seed for p in self.pieces]
        self._extra = [complex(z) for z in extra_sigma]
        self._sigma = None

    # constructors ---------------------------------------------------------
    @classmethod
    def from_values(cls, gamma: PiecewisePath, funcs, values: Sequence[complex], tol: Tolerances | None = None):
        """Seeds given by function values at the piece midpoints."""
        if isinstance(funcs, AlgebraicFunctionDef):
            funcs = [funcs] * len(gamma.segments)
        seeds = []
        for f, seg, w in zip(funcs, gamma.segments, values):
            ys = f.sheets(complex(seg.point(0.5)))[0]
            seeds.append(complex(ys[np.argmin(np.abs(f.value(ys) - w))]))
        return cls(gamma, funcs, seeds, tol)

    @classmethod
    def continued(cls, gamma: PiecewisePath, f: AlgebraicFunctionDef, first_values: Sequence[complex] | complex,
                  tol: Tolerances | None = None, at: str = "mid"):
        """One branch continued along each component.

        ``first_values`` fixes the branch at the midpoint (``at="mid"``) or at
        the start point (``at="start"``) of each component's first piece.
        """
        tol = tol or gamma.tol
        if not isinstance(first_values, (list, tuple)):
            first_values = [first_values] * len(gamma.components)
        seeds: list = [None] * len(gamma.segments)
        for (i0, i1, _), w0 in zip(gamma.components, first_values):
            seg = gamma.segments[i0]
            where = 0.5 if at == "mid" else 0.0
            ys = f.sheets(complex(seg.point(where)))[0]
            y = complex(ys[np.argmin(np.abs(f.value(ys) - w0))])
            if at != "mid":
                y, _ = track_segment(f, seg, y, 0.0, 0.5, tol)
            seeds[i0] = y
            y, _ = track_segment(f, seg, y, 0.5, 1.0, tol)
            for k in range(i0 + 1, i1):
                y, _ = track_segment(f, gamma.segments[k], y, 0.0, 0.5, tol)
                seeds[k] = y
                y, _ = track_segment(f, gamma.segments[k], y, 0.5, 1.0, tol)
        return cls(gamma, f, seeds, tol)

    @classmethod
    def pushforward(cls, P, Q, Gamma: PiecewisePath, tol: Tolerances | None = None):
        from .algebraic import pushforward_assignment

        gamma, f, seeds, _ = pushforward_assignment(P, Q, Gamma, tol)
        a = cls(gamma, f, seeds, tol)
        a.source_curve = Gamma
        return a

    # marked points ----------------------------------------------------------
    def piece_value(self, k: int, s) -> np.ndarray:
        return self.pieces[k].value_s(s)

    def germ_on_piece(self, k: int, s: float, order: int | None = None) -> BranchGerm:
        order = self.tol.jet_order if order is None else order
        p = self.pieces[k]
        z = complex(self.gamma.segments[k].point(s))
        y = complex(p.sheet_s(s)[0])
        return BranchGerm(z, jet_at(p.f, z, y, order), p.f, y)

    @property
    def sigma(self) -> list[complex]:
        """Marked points: endpoints, crossings, junctions, jumps and singular vertices."""
        if self._sigma is None:
            self._sigma = self._compute_sigma()
        return self._sigma

    def crossings(self):
        return self_intersections(self.gamma, self.tol)

    def _compute_sigma(self) -> list[complex]:
        g = self.gamma
        pts = list(g.endpoints()) + [c.point for c in self.crossings()] + list(junction_points(g, self.tol))
        pts += [z for z, _ in self.jump_points()]
        for k, p in enumerate(self.pieces):
            if p.singular[0]:
                pts.append(complex(g.segments[k].point(0)))
            if p.singular[1]:
                pts.append(complex(g.segments[k].point(1)))
        pts += self._extra
        return _unique(pts, g.eps * 10 + 1e-12)

    def jump_points(self) -> list[tuple[complex, tuple[int, int]]]:
        """Interior vertices where the germs on the two sides differ."""
        out = []
        g = self.gamma
        for k in range(len(g.segments)):
            k2 = g.next_piece(k)
            if k2 is None:
                continue
            z0 = complex(g.segments[k].point(1))
            if not self._continues(k, k2, z0):
                out.append((z0, (k, k2)))
        return out

    def _continues(self, k: int, k2: int, z0: complex) -> bool:
        p, q = self.pieces[k], self.pieces[k2]
        order = self.tol.jet_order
        if p.singular[1] or q.singular[0]:
            if not p.f.same_as(q.f):
                return False
            rho = min(local_radius(p.f, z0), 0.25 * abs(complex(p.seg.point(0.5)) - z0),
                      0.25 * abs(complex(q.seg.point(0.5)) - z0))
            sp = _param_at_radius(p.seg, 1, z0, rho)
            sq = _param_at_radius(q.seg, 0, z0, rho)
            zp, zq = complex(p.seg.point(sp)), complex(q.seg.point(sq))
            yp, yq = complex(p.sheet_s(sp)[0]), complex(q.sheet_s(sq)[0])
            th0, th1 = cmath.phase(zp - z0), cmath.phase(zq - z0)
            sweep = (th1 - th0) % (2 * math.pi)
            y, _ = track_segment(p.f, ArcSegment(z0, rho, th0, sweep), yp, 0.0, 1.0, self.tol)
            ys = p.f.sheets(zq)[0]
            return int(np.argmin(np.abs(ys - y))) == int(np.argmin(np.abs(ys - yq)))
        jp = jet_at(p.f, z0, complex(p.sheet_s(1.0)[0]), order)
        jq = jet_at(q.f, z0, complex(q.sheet_s(0.0)[0]), order)
        scale = max(1.0, float(np.max(np.abs(jp))))
        return bool(np.all(np.abs(jp - jq) <= self.tol.eps_jet * scale))

    @property
    def sigma1(self) -> list[complex]:
        """Singular points of the functions that lie off the curve."""
        pts = []
        for f in _distinct(self.funcs):
            for d in f.discriminant_points:
                if self.gamma.distance(d) > 1e-7 * (1 + abs(d)):
                    pts.append(complex(d))
        return _unique(pts, 1e-9)

    def distinct_functions(self) -> list[AlgebraicFunctionDef]:
        return _distinct(self.funcs)

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma.to_json(),
            "functions": [f.to_json() for f in self.funcs],
            "seeds": [[s.real, s.imag] for s in self.seeds],
        }

    @classmethod
    def from_json(cls, d: dict, tol: Tolerances = DEFAULT) -> "IntegrandAssignment":
        gamma = PiecewisePath.from_json(d["gamma"], tol)
        fs = d.get("functions") or [d["function"]]
        funcs = [AlgebraicFunctionDef.from_json(f, tol) for f in fs]
        if len(funcs) == 1:
            funcs = funcs * len(gamma.segments)
        if "values" in d:
            vals = [complex(*v) if isinstance(v, (list, tuple)) else complex(v) for v in d["values"]]
            if len(vals) == 1 and len(funcs) > 1 and "continue" in d:
                return cls.continued(gamma, funcs[0], vals[0], tol)
            return cls.from_values(gamma, funcs, vals, tol)
        if "start_values" in d:
            vals = [complex(*v) for v in d["start_values"]]
            return cls.continued(gamma, funcs[0], vals, tol)
        seeds = [complex(*s) for s in d["seeds"]]
        return cls(gamma, funcs, seeds, tol)


def _distinct(funcs):
    out = []
    for f in funcs:
        if not any(f.same_as(h) for h in out):
            out.append(f)
    return out


def _unique(pts, tol):
    out: list[complex] = []
    for p in pts:
        if not any(abs(p - q) <= tol * (1 + abs(q)) for q in out):
            out.append(complex(p))
    return out


def _param_at_radius(seg: Segment, e: int, z0: complex, rho: float) -> float:
    """Parameter on ``seg`` (between the midpoint and end ``e``) at distance ``rho`` from ``z0``."""
    lo, hi = (0.0, 0.5) if e == 0 else (0.5, 1.0)
    inner, outer = (lo, hi) if e == 0 else (hi, lo)
    for _ in range(80):
        mid = 0.5 * (inner + outer)
        if abs(complex(seg.point(mid)) - z0) < rho:
            inner = mid
        else:
            outer = mid
    return 0.5 * (inner + outer)


# ---------------------------------------------------------------------------
# quadrature


def _adaptive(piece: PieceBranch, e: int, kernel: Callable, weights: np.ndarray, tol_abs: float,
              max_depth: int = 48):
    """Adaptive Gauss-Legendre over ``v in [0, 1]`` for a vector-valued kernel.

    ``kernel(z)`` returns shape (m, N); the integrand is ``kernel * w * dz``.
    Returns ``(value, error_estimate)``.
    """
    total = np.zeros(len(weights), complex)
    err = 0.0
    stack = [(0.0, 1.0, 0)]
    seen = {}
    _kernel_dist = kernel.dist if hasattr(kernel, "dist") else (lambda z: np.full(len(z), np.inf))

    def panel(a, b):
        key = (a, b)
        if key not in seen:
            z, dzw, w, absdz = piece.nodes(e, a, b)
            terms = kernel(z) * (w * dzw)[None, :]
            mass = float(np.max(np.abs(terms).sum(axis=1) / weights))
            seen[key] = (terms.sum(axis=1), float(absdz.sum()), z, mass)
        return seen[key]

    while stack:
        a, b, depth = stack.pop()
        val, length, z, mass = panel(a, b)
        dz = _kernel_dist(z)
        d = float(np.min(dz))
        m = 0.5 * (a + b)
        if depth < max_depth and length > 0.5 * d:
            stack.append((a, m, depth + 1))
            stack.append((m, b, depth + 1))
            continue
        vl = panel(a, m)[0]
        vr = panel(m, b)[0]
        diff = float(np.max(np.abs((vl + vr - val) / weights)))
        # rounding floor: cancellation in z - t amplifies the error of large integrands
        cancel = float(np.max(np.abs(z)) / d) if np.isfinite(d) and d > 0 else 1.0
        floor = 64 * np.finfo(float).eps * mass * max(1.0, cancel)
        if diff <= max(tol_abs * max(length, 1e-300), floor) or b - a < 1e-14:
            total += vl + vr
            err += diff
        elif depth >= max_depth:
            raise QuadratureNotConverged("adaptive quadrature did not converge", error=diff)
        else:
            stack.append((a, m, depth + 1))
            stack.append((m, b, depth + 1))
    return total, err


class _CauchyKernel:
    def __init__(self, t: complex):
        self.t = t

    def __call__(self, z):
        return (1.0 / (z - self.t))[None, :]

    def dist(self, z):
        return np.abs(z - self.t)


class _PowerKernel:
    def __init__(self, K: int):
        self.K = K

    def __call__(self, z):
        return np.vander(z, self.K + 1, increasing=True).T


def eval_cauchy(a: IntegrandAssignment, t: complex, tol: Tolerances | None = None) -> complex:
    """``I(t)`` at a point off the curve."""
    tol = tol or a.tol
    t = complex(t)
    if a.gamma.distance(t) <= a.gamma.eps:
        raise PointOnCurve("t lies on the curve", t=t)
    ker = _CauchyKernel(t)
    total = 0j
    for p in a.pieces:
        for e in (0, 1):
            v, _ = _adaptive(p, e, ker, np.ones(1), tol.eps_quad)
            total += v[0]
    return total / TWO_PI_I


def eval_cauchy_many(a: IntegrandAssignment, ts, tol: Tolerances | None = None) -> np.ndarray:
    return np.array([eval_cauchy(a, t, tol) for t in np.atleast_1d(ts)], complex)


@dataclass
class MomentTable:
    values: np.ndarray
    errors: np.ndarray
    method: str = "quadrature"
    tail_residual: float | None = None

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def rows(self):
        return [(k, complex(v).real, complex(v).imag, self.method, float(e))
                for k, (v, e) in enumerate(zip(self.values, self.errors))]

    def to_json(self) -> dict:
        return {"method": self.method, "moments": [[complex(v).real, complex(v).imag] for v in self.values],
                "errors": [float(e) for e in self.errors], "tail_residual": self.tail_residual}


def raw_moments(a: IntegrandAssignment, K: int, tol: Tolerances | None = None):
    tol = tol or a.tol
    R = max(1.0, a.gamma.radius())
    weights = np.array([R ** k for k in range(K + 1)], float)
    vals = np.zeros(K + 1, complex)
    errs = np.zeros(K + 1)
    ker = _PowerKernel(K)
    for p in a.pieces:
        for e in (0, 1):
            v, err = _adaptive(p, e, ker, weights, tol.eps_quad)
            vals += v
            errs += err * weights
    return vals, errs


def moment_sequence(a: IntegrandAssignment, K: int, tol: Tolerances | None = None, check_tail: bool = True) -> MomentTable:
    """``m_k`` for ``k = 0..K`` plus the tail identity check at ``|t| = 10 R``."""
    tol = tol or a.tol
    if K < 0:
        raise SchemaError("K must be non-negative")
    Kq = max(K, 14) if check_tail else K
    vals, errs = raw_moments(a, Kq, tol)
    table = MomentTable(vals[: K + 1], errs[: K + 1])
    if check_tail:
        table.tail_residual = tail_residual(a, vals, tol)
    return table


def tail_series(moments: Sequence[complex], t: complex) -> complex:
    """``-(1/2 pi i) sum m_k t^{-k-1}``."""
    s = 0j
    for k, m in enumerate(moments):
        s += m * t ** (-k - 1)
    return -s / TWO_PI_I


def tail_residual(a: IntegrandAssignment, moments, tol: Tolerances | None = None, n_points: int = 6) -> float:
    c = a.gamma.centroid()
    R = a.gamma.radius(0j)
    worst = 0.0
    for j in range(n_points):
        t = 10 * R * cmath.exp(2j * math.pi * (j + 0.37) / n_points)
        worst = max(worst, abs(eval_cauchy(a, t, tol) - tail_series(moments, t)))
    return worst


# ---------------------------------------------------------------------------
# rational closed forms


@dataclass
class PrincipalPart:
    pole: complex
    coeffs: np.ndarray  # coefficient of (t - pole)^-(l+1)
    mu: int

    def __call__(self, t):
        h = np.asarray(t) - self.pole
        out = np.zeros_like(h, dtype=complex)
        for l, c in enumerate(self.coeffs):
            out = out + c * h ** (-(l + 1))
        return out


@dataclass
class RationalClosedForm:
    num: np.ndarray
    den: np.ndarray
    parts: list
    partition: DomainPartition | None
    region_mu: dict

    def g(self, t):
        return polyval(self.num, t) / polyval(self.den, t)

    def evaluate(self, t: complex, mu: int | None = None) -> complex:
        if mu is None:
            mu = winding_number(self.partition.path, t) if self.partition is not None else 0
        out = mu * self.g(t)
        for p in self.parts:
            if p.mu:
                out = out - p.mu * p(t)
        return complex(out)

    @property
    def vanishes_on_D0(self) -> bool:
        return all(p.mu == 0 for p in self.parts)

    def describe(self) -> list[dict]:
        return [{"region": rid, "mu": mu,
                 "poles": [{"pole": [p.pole.real, p.pole.imag], "mu": p.mu} for p in self.parts if p.mu]}
                for rid, mu in sorted(self.region_mu.items())]

    def to_json(self) -> dict:
        return {"regions": self.describe(), "vanishes_on_D0": self.vanishes_on_D0}


def principal_parts(num, den, cluster: float = 1e-6) -> list[tuple[complex, np.ndarray]]:
    """Poles with their principal-part coefficients."""
    num = np.asarray(num, complex)
    den = np.asarray(den, complex)
    roots = poly_roots(den)
    out = []
    remaining = list(roots)
    while remaining:
        r = remaining.pop(0)
        grp = [r] + [q for q in remaining if abs(q - r) <= cluster * (1 + abs(r))]
        remaining = [q for q in remaining if q not in grp[1:]]
        z0 = complex(np.mean(grp))
        m = len(grp)
        N = len(den) + m + 1
        d = taylor_shift(den, z0, N)
        d = d[m:]
        nn = taylor_shift(num, z0, N)
        ser = s_div(nn, d, m)  # g * h^m = ser, so coeff of h^{-(l+1)} is ser[m-1-l]
        out.append((z0, np.array([ser[m - 1 - l] for l in range(m)], complex)))
    return out


def closed_form_rational(num, den, gamma: PiecewisePath, partition: DomainPartition | None = None
                         ) -> RationalClosedForm:
    """``mu(t) g(t) - sum_j mu(z_j) R_j(t)`` on a closed curve."""
    if not gamma.closed:
        raise NotClosed("closed-form rational integrals need a closed curve")
    num = np.asarray(num, complex)
    den = np.asarray(den, complex)
    parts = []
    for z0, c in principal_parts(num, den):
        if gamma.distance(z0) <= max(gamma.eps, 1e-12) * 10:
            raise PoleOnCurve("pole on the curve", pole=z0)
        parts.append(PrincipalPart(z0, c, winding_number(gamma, z0)))
    region_mu = {r.id: r.mu for r in partition.regions} if partition is not None else {}
    cf = RationalClosedForm(num, den, parts, partition, region_mu)
    cf.gamma = gamma
    return cf


# ---------------------------------------------------------------------------
# local models


@dataclass
class LocalModel:
    center: complex
    log_coefficient: np.ndarray
    ramification_order: int
    finite: bool
    regular_remainder: bool
    residual: float
    sides: list = field(default_factory=list)
    kind: str = "endpoint"
    regular_parts_equal: bool | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "center": [self.center.real, self.center.imag],
            "log_coefficient": [[float(c.real), float(c.imag)] for c in self.log_coefficient],
            "ramification_order": self.ramification_order,
            "finite_ramification": self.finite,
            "regular_remainder": self.regular_remainder,
            "residual": self.residual,
            "regular_parts_equal": self.regular_parts_equal,
            "sides": self.sides,
        }


def _incident(a: IntegrandAssignment, z0: complex) -> list[tuple[int, int]]:
    """(piece, end) pairs touching ``z0``."""
    tol = max(a.gamma.eps * 10, 1e-10)
    out = []
    for k, seg in enumerate(a.gamma.segments):
        for e in (0, 1):
            if abs(complex(seg.point(e)) - z0) <= tol * (1 + abs(z0)):
                out.append((k, e))
    return out


def _model_radius(a: IntegrandAssignment, z0: complex, incident) -> float:
    d = []
    for p in list(a.sigma) + list(a.sigma1):
        if abs(p - z0) > 1e-9 * (1 + abs(z0)):
            d.append(abs(p - z0))
    inc = {k for k, _ in incident}
    for k, seg in enumerate(a.gamma.segments):
        if k not in inc:
            d.append(PiecewisePath([seg], False, a.tol).distance(z0))
        else:
            d.append(0.5 * abs(complex(seg.point(0.5)) - z0))
    for f in a.distinct_functions():
        for p in f.discriminant_points:
            if abs(p - z0) > 1e-9 * (1 + abs(z0)):
                d.append(abs(p - z0))
    return min(d) if d else 1.0


def regular_part(a: IntegrandAssignment, k: int, e: int, order: int, rho: float) -> tuple[np.ndarray, int, float]:
    """Regular part at the end ``e`` of piece ``k``: (jet, cycle length, fit residual)."""
    p = a.pieces[k]
    f = p.f
    z0 = complex(p.seg.point(e))
    s = _param_at_radius(p.seg, e, z0, rho)
    zs = complex(p.seg.point(s))
    ys = complex(p.sheet_s(s)[0])
    prof = ramification_profile(f, z0, jet_order=order, tol=a.tol.with_(eps_jet=1e-3), radius=rho,
                                angle=cmath.phase(zs - z0))
    slots = f.sorted_sheets(prof.base)
    slot = int(np.argmin(np.abs(slots - ys)))
    ci = prof.cycle_of(slot)
    return prof.regular_parts[ci], prof.cycles[ci][0], prof.residuals[ci]


def _log_model(a: IntegrandAssignment, z0: complex, incident, order: int, rho: float):
    coef = np.zeros(order + 1, complex)
    sides = []
    ell = 1
    resid = 0.0
    for k, e in incident:
        jet, ln, res = regular_part(a, k, e, order, rho)
        sign = -1.0 if e == 0 else 1.0
        coef = coef + sign * jet / TWO_PI_I
        ell = ell * ln // math.gcd(ell, ln)
        resid = max(resid, res)
        sides.append({"piece": k, "end": e, "cycle_length": ln,
                      "regular_part": [[float(c.real), float(c.imag)] for c in jet[:4]]})
    return coef, ell, resid, sides


def _validate(a: IntegrandAssignment, z0: complex, coef: np.ndarray, ell: int, r: float, tol: Tolerances) -> float:
    """Fit ``I - c Log`` by a power series in ``(t - z0)^(1/ell)`` on the widest sector."""
    radii = [r, 0.6 * r]
    circ = PiecewisePath([ArcSegment(z0, radii[0], 0.0, 2 * math.pi)], True, tol)
    try:
        xs = crossing_sequence(circ, a.gamma, (), tol)
        angles = sorted(cmath.phase(c.point - z0) % (2 * math.pi) for c in xs)
    except Exception:
        angles = []
    if not angles:
        lo, width = 0.0, 2 * math.pi
    else:
        gaps = [((angles[(i + 1) % len(angles)] - angles[i]) % (2 * math.pi)) or 2 * math.pi
                for i in range(len(angles))]
        i = int(np.argmax(gaps))
        lo, width = angles[i], gaps[i]
    deg = min(12 * ell, 40)
    M = max(3 * deg, 48)
    th = lo + width * (0.08 + 0.84 * (np.arange(M) + 0.5) / M)
    ts, Ds = [], []
    for rr in radii:
        t = z0 + rr * np.exp(1j * th)
        I = eval_cauchy_many(a, t, tol)
        h = t - z0
        logh = np.log(rr) + 1j * th
        c = polyval(coef, h)
        ts.append(h)
        Ds.append(I - c * logh)
    h = np.concatenate(ts)
    D = np.concatenate(Ds)
    tau = np.exp((np.log(np.abs(h)) + 1j * np.concatenate([th, th])) / ell) / r ** (1.0 / ell)
    V = np.stack([tau ** m for m in range(deg + 1)], axis=1)
    sol, *_ = np.linalg.lstsq(V, D, rcond=None)
    return float(np.sqrt(np.mean(np.abs(V @ sol - D) ** 2)))


def _finalize(a, z0, incident, kind, jet_order, validate, tol):
    tol = tol or a.tol
    J = tol.jet_order if jet_order is None else jet_order
    dist = _model_radius(a, z0, incident)
    rho = 0.1 * dist
    coef, ell, resid, sides = _log_model(a, z0, incident, max(J, 16), rho)
    scale = max([1.0] + [abs(complex(a.pieces[k].value_s(0.5)[0])) for k, _ in incident])
    scaled = np.abs(coef[: J + 1]) * rho ** np.arange(J + 1) * 2 * math.pi
    finite = bool(np.all(scaled <= tol.eps_jet * scale))
    fit = None
    if validate:
        fit = _validate(a, z0, coef, ell, 0.5 * rho, tol)
        if fit > 10 * tol.eps_quad * max(1.0, scale) * 10:
            raise ModelMismatch("local model does not match the integral", residual=fit)
    model = LocalModel(z0, coef[: J + 1], ell if finite else 0, finite, validate, fit if fit is not None else resid,
                       sides, kind)
    model.jet_residual = resid
    return model


def endpoint_local_model(a: IntegrandAssignment, z0: complex, jet_order: int | None = None,
                         validate: bool = True, tol: Tolerances | None = None) -> LocalModel:
    """Log coefficient ``-g_r / 2 pi i`` at a start point (``+`` at a terminal point)."""
    z0 = complex(z0)
    incident = _incident(a, z0)
    if len(incident) != 1:
        raise SchemaError("z0 is not a free endpoint of the curve", incident=len(incident))
    return _finalize(a, z0, incident, "endpoint", jet_order, validate, tol)


def jump_local_model(a: IntegrandAssignment, z0: complex, jet_order: int | None = None,
                     validate: bool = True, tol: Tolerances | None = None) -> LocalModel:
    """Log coefficient ``(g_r0 - g_r1) / 2 pi i`` at an interior marked point.

    ``g_r0`` belongs to the piece arriving at ``z0`` and ``g_r1`` to the one leaving it.
    """
    z0 = complex(z0)
    incident = _incident(a, z0)
    if len(incident) != 2 or sorted(e for _, e in incident) != [0, 1]:
        raise SchemaError("z0 is not a simple interior vertex of the curve", incident=len(incident))
    m = _finalize(a, z0, incident, "jump", jet_order, validate, tol)
    m.kind = "jump"
    m.regular_parts_equal = m.finite
    m.jump_present = not a._continues(*(k for k, e in sorted(incident, key=lambda x: -x[1])), z0)
    return m
