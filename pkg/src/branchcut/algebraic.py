"""Algebraic functions, branch tracking, monodromy and ramification data.

Two representations are supported.  The explicit one stores a bivariate
polynomial ``A(z, w)``; its *sheet variable* is ``w`` itself.  The composite one
stores a pair ``(P, Q)`` with ``g = Q(P^{-1}(z))``; its sheet variable is the
preimage ``x`` (a root of ``P(x) - z``) and the value is ``Q(x)``.  All
tracking happens in the sheet variable, which keeps coincident values of
``Q`` on different sheets apart.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    CriticalPointOnPath,
    FitResidualTooLarge,
    LeadingCoefficientVanishes,
    NearDiscriminant,
    PathTooClose,
    SchemaError,
    TrackingAmbiguity,
)
from .paths import ArcSegment, LineSegment, ParametricSegment, PiecewisePath, Segment

# ---------------------------------------------------------------------------
# polynomial helpers (ascending coefficient arrays)


def polyval(c: np.ndarray, x):
    """Horner evaluation of an ascending coefficient array."""
    x = np.asarray(x)
    out = np.zeros_like(x, dtype=complex) + c[-1]
    for a in c[-2::-1]:
        out = out * x + a
    return out


def polyder(c: np.ndarray) -> np.ndarray:
    if len(c) <= 1:
        return np.zeros(1, complex)
    return c[1:] * np.arange(1, len(c))


def trim(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    k = len(c)
    while k > 1 and c[k - 1] == 0:
        k -= 1
    return c[:k].copy()


def poly_roots(c: np.ndarray) -> np.ndarray:
    c = trim(c)
    if len(c) <= 1:
        return np.zeros(0, complex)
    return np.roots(c[::-1])


def taylor_shift(c: np.ndarray, z0: complex, N: int) -> np.ndarray:
    """Coefficients of ``p(z0 + h)`` in ``h`` truncated to ``N`` terms."""
    c = np.array(c, dtype=complex)
    n = len(c)
    out = np.zeros(max(N, 1), complex)
    work = c.copy()
    for m in range(min(N, n)):
        # synthetic division by (z - z0)
        acc = 0j
        quo = np.zeros(len(work) - 1 if len(work) > 1 else 1, complex)
        for k in range(len(work) - 1, -1, -1):
            acc = acc * z0 + work[k]
            if k > 0:
                quo[k - 1] = acc
        out[m] = acc
        work = quo
        if len(work) == 0:
            break
    return out


# truncated power series ---------------------------------------------------


def s_mul(a, b, N):
    return np.convolve(a[:N], b[:N])[:N]


def s_div(a, b, N):
    q = np.zeros(N, complex)
    for m in range(N):
        acc = a[m] if m < len(a) else 0
        for k in range(1, min(m, len(b) - 1) + 1):
            acc -= b[k] * q[m - k]
        q[m] = acc / b[0]
    return q


def s_poly(c: np.ndarray, y: np.ndarray, N: int) -> np.ndarray:
    """Series of ``p(y(h))`` for a polynomial ``p`` with scalar coefficients."""
    out = np.zeros(N, complex)
    out[0] = c[-1]
    for a in c[-2::-1]:
        out = s_mul(out, y, N)
        out[0] += a
    return out


def s_poly_series(cs: Sequence[np.ndarray], y: np.ndarray, N: int) -> np.ndarray:
    """Series of ``sum_k cs[k](h) y(h)^k`` where the ``cs[k]`` are series."""
    out = np.array(cs[-1][:N], dtype=complex)
    for a in cs[-2::-1]:
        out = s_mul(out, y, N)
        out = out + a[:N]
    return out


# ---------------------------------------------------------------------------
# algebraic function definition


def _as_poly(c) -> np.ndarray:
    """Accepts numbers, ``[re, im]`` pairs or complex values."""
    out = []
    for a in c:
        if isinstance(a, (list, tuple)):
            out.append(complex(float(a[0]), float(a[1])))
        else:
            out.append(complex(a))
    return trim(np.array(out, dtype=complex)) if out else np.zeros(1, complex)


class AlgebraicFunctionDef:
    """Multivalued function ``g`` defined by ``A(z, w) = 0`` or by ``g = Q(P^{-1})``.

    Parameters
    ----------
    A : array_like, optional
        ``A[j, k]`` is the coefficient of ``z**j * w**k``.
    P, Q : array_like, optional
        Ascending coefficients of the composite form.
    label : str
    """

    def __init__(self, A=None, P=None, Q=None, label: str = "", tol: Tolerances = DEFAULT):
        self.tol = tol
        self.label = label
        if A is not None:
            A = np.atleast_2d(np.asarray(A, dtype=complex))
            # drop zero rows/columns at the top
            while A.shape[1] > 1 and not A[:, -1].any():
                A = A[:, :-1]
            while A.shape[0] > 1 and not A[-1, :].any():
                A = A[:-1, :]
            if A.shape[1] < 2:
                raise SchemaError("A(z, w) must have positive degree in w")
            self.kind = "explicit"
            self.A = A
            self.n = A.shape[1] - 1
            self.P = self.Q = None
        else:
            if P is None:
                raise SchemaError("either A or (P, Q) is required")
            self.kind = "composite"
            self.P = _as_poly(P)
            self.Q = _as_poly(Q if Q is not None else [0, 1])
            self.n = len(self.P) - 1
            if self.n < 1:
                raise SchemaError("P must be non-constant")
            self.A = None
        self._dP = polyder(self.P) if self.kind == "composite" else None
        self._dQ = polyder(self.Q) if self.kind == "composite" else None

    # constructors -----------------------------------------------------------
    @classmethod
    def explicit(cls, A, label: str = "", tol: Tolerances = DEFAULT):
        return cls(A=A, label=label, tol=tol)

    @classmethod
    def composite(cls, P, Q, label: str = "", tol: Tolerances = DEFAULT):
        return cls(P=P, Q=Q, label=label, tol=tol)

    @classmethod
    def rational(cls, num, den=(1,), label: str = "", tol: Tolerances = DEFAULT):
        num, den = _as_poly(num), _as_poly(den)
        m = max(len(num), len(den))
        A = np.zeros((m, 2), complex)
        A[: len(den), 1] = den
        A[: len(num), 0] = -num
        f = cls(A=A, label=label, tol=tol)
        f.num, f.den = num, den
        return f

    @classmethod
    def radical(cls, r: int, c, scale: complex = 1.0, label: str = "", tol: Tolerances = DEFAULT):
        """``w**r = scale**r * c(z)``, that is ``w = scale * c(z)**(1/r)``."""
        c = _as_poly(c)
        A = np.zeros((len(c), r + 1), complex)
        A[:, 0] = -c * scale ** r
        A[0, r] = 1.0
        return cls(A=A, label=label, tol=tol)

    def to_json(self) -> dict:
        def enc(c):
            return [[float(a.real), float(a.imag)] for a in c]

        if self.kind == "composite":
            return {"kind": "composite", "P": enc(self.P), "Q": enc(self.Q)}
        return {"kind": "explicit", "A": [enc(row) for row in self.A]}

    @classmethod
    def from_json(cls, d: dict, tol: Tolerances = DEFAULT) -> "AlgebraicFunctionDef":
        kind = d.get("kind")
        if kind == "composite":
            return cls.composite(d["P"], d["Q"], tol=tol)
        if kind == "explicit":
            A = [[complex(*a) if isinstance(a, (list, tuple)) else complex(a) for a in row] for row in d["A"]]
            return cls.explicit(A, tol=tol)
        if kind == "rational":
            return cls.rational(d["num"], d.get("den", [1]), tol=tol)
        if kind == "polynomial":
            return cls.rational(d["coeffs"], [1], tol=tol)
        if kind == "radical":
            return cls.radical(int(d["r"]), d["c"], complex(*d.get("scale", [1, 0])), tol=tol)
        raise SchemaError(f"unknown function kind {kind!r}")

    def __repr__(self) -> str:
        return f"AlgebraicFunctionDef({self.kind}, n={self.n}{', ' + self.label if self.label else ''})"

    def same_as(self, other: "AlgebraicFunctionDef") -> bool:
        if self is other:
            return True
        if self.kind != other.kind:
            return False
        if self.kind == "composite":
            return (len(self.P) == len(other.P) and len(self.Q) == len(other.Q)
                    and np.allclose(self.P, other.P) and np.allclose(self.Q, other.Q))
        return self.A.shape == other.A.shape and np.allclose(self.A, other.A)

    # sheet polynomial ---------------------------------------------------------
    def sheet_coeffs(self, z) -> np.ndarray:
        """Ascending coefficients in the sheet variable at each ``z``: shape (N, n+1)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.kind == "composite":
            c = np.tile(self.P, (len(z), 1))
            c[:, 0] -= z
            return c
        return np.stack([polyval(self.A[:, k], z) for k in range(self.n + 1)], axis=1)

    def F(self, z, y):
        z, y = np.asarray(z, complex), np.asarray(y, complex)
        if self.kind == "composite":
            return polyval(self.P, y) - z
        out = np.zeros(np.broadcast(z, y).shape, complex) + polyval(self.A[:, -1], z)
        for k in range(self.n - 1, -1, -1):
            out = out * y + polyval(self.A[:, k], z)
        return out

    def Fy(self, z, y):
        z, y = np.asarray(z, complex), np.asarray(y, complex)
        if self.kind == "composite":
            return polyval(self._dP, y)
        out = np.zeros(np.broadcast(z, y).shape, complex) + self.n * polyval(self.A[:, -1], z)
        for k in range(self.n - 1, 0, -1):
            out = out * y + k * polyval(self.A[:, k], z)
        return out

    def Fz(self, z, y):
        z, y = np.asarray(z, complex), np.asarray(y, complex)
        if self.kind == "composite":
            return -np.ones(np.broadcast(z, y).shape, complex)
        dA = [polyder(self.A[:, k]) for k in range(self.n + 1)]
        out = np.zeros(np.broadcast(z, y).shape, complex) + polyval(dA[-1], z)
        for k in range(self.n - 1, -1, -1):
            out = out * y + polyval(dA[k], z)
        return out

    def value(self, y, z=None):
        """Function value on the sheet ``y``."""
        if self.kind == "composite":
            return polyval(self.Q, y)
        return np.asarray(y, complex)

    def dvalue_dy(self, y):
        if self.kind == "composite":
            return polyval(self._dQ, y)
        return np.ones_like(np.asarray(y, complex))

    def sheets(self, z) -> np.ndarray:
        """All sheet values at each ``z``; shape (N, n), unsorted but polished."""
        c = self.sheet_coeffs(z)
        N, m = c.shape
        n = m - 1
        lead = c[:, -1]
        scale = np.max(np.abs(c), axis=1)
        if np.any(np.abs(lead) <= 1e-14 * np.maximum(scale, 1e-300)):
            raise LeadingCoefficientVanishes("leading coefficient vanishes", z=complex(np.atleast_1d(z)[0]))
        if n == 1:
            return (-c[:, 0] / c[:, 1])[:, None]
        comp = np.zeros((N, n, n), complex)
        comp[:, 0, :] = -c[:, -2::-1] / lead[:, None]
        idx = np.arange(n - 1)
        comp[:, idx + 1, idx] = 1.0
        y = np.linalg.eigvals(comp)
        zz = np.asarray(z, complex).reshape(-1)[:, None]
        for _ in range(2):
            fy = self.Fy(zz, y)
            ok = np.abs(fy) > 1e-300
            step = np.where(ok, self.F(zz, y) / np.where(ok, fy, 1.0), 0.0)
            small = np.abs(step) < 1e-3 * (1.0 + np.abs(y))
            y = np.where(small, y - step, y)
        return y

    def sorted_sheets(self, z: complex) -> np.ndarray:
        """Sheets at a single point in the canonical slot order."""
        y = self.sheets(complex(z))[0]
        w = self.value(y)
        scale = max(1.0, float(np.max(np.abs(w))))
        ys = max(1.0, float(np.max(np.abs(y))))
        key = sorted(range(len(y)), key=lambda i: (round(w[i].real / scale, 7), round(w[i].imag / scale, 7),
                                                    round(y[i].real / ys, 7), round(y[i].imag / ys, 7)))
        return y[key]

    # singular points ------------------------------------------------------------
    @cached_property
    def discriminant_points(self) -> np.ndarray:
        """Points where sheets collide or escape to infinity."""
        if self.kind == "composite":
            crit = poly_roots(self._dP)
            vals = polyval(self.P, crit) if len(crit) else np.zeros(0, complex)
            return _dedupe(vals)
        pts = list(poly_roots(self.A[:, -1]))
        if self.n >= 2:
            pts += list(self._collision_points())
        return _dedupe(np.array(pts, complex))

    def _collision_points(self) -> np.ndarray:
        n = self.n
        dz = self.A.shape[0] - 1
        deg = (2 * n - 1) * dz
        if deg == 0:
            return np.zeros(0, complex)
        M = 1 << int(math.ceil(math.log2(deg + 1)))
        rho = 1.0
        zs = rho * np.exp(2j * np.pi * np.arange(M) / M)
        vals = np.array([_sylvester_disc(self.sheet_coeffs(z)[0]) for z in zs])
        coef = np.fft.fft(vals) / M / rho ** np.arange(M)
        mx = np.max(np.abs(coef))
        if mx == 0:
            raise SchemaError("A is not square-free in w")
        coef[np.abs(coef) < 1e-11 * mx] = 0
        cand = _cluster_means(poly_roots(coef))
        out = []
        for z0 in cand:
            z1 = self._refine_collision(z0)
            if z1 is not None:
                out.append(z1)
        return np.array(out, complex)

    def _refine_collision(self, z0: complex):
        try:
            y = self.sheets(z0)[0]
        except LeadingCoefficientVanishes:
            return None
        if len(y) < 2:
            return None
        d = np.abs(y[:, None] - y[None, :]) + np.eye(len(y)) * 1e300
        i, j = np.unravel_index(np.argmin(d), d.shape)
        scale = 1.0 + abs(y[i])
        if d[i, j] > 5e-2 * scale:
            return None
        z, w = complex(z0), complex(0.5 * (y[i] + y[j]))
        for _ in range(60):
            f1 = complex(self.F(z, w))
            f2 = complex(self.Fy(z, w))
            a11 = complex(self.Fz(z, w))
            a12 = f2
            a21 = complex(_Fzy(self, z, w))
            a22 = complex(_Fyy(self, z, w))
            det = a11 * a22 - a12 * a21
            if det == 0:
                break
            dz = (f1 * a22 - a12 * f2) / det
            dw = (a11 * f2 - a21 * f1) / det
            z, w = z - dz, w - dw
            if abs(dz) < 1e-15 * (1 + abs(z)):
                break
        if abs(z - z0) > 1e-2 * (1 + abs(z0)):
            return complex(z0)
        return z


def _cluster_means(roots: np.ndarray, rel: float = 1e-4) -> np.ndarray:
    """Average clusters of nearby roots (perturbed multiple roots)."""
    left = list(roots)
    out = []
    while left:
        r = left.pop(0)
        grp = [r] + [q for q in left if abs(q - r) <= rel * (1 + abs(r))]
        left = [q for q in left if q not in grp[1:]]
        out.append(complex(np.mean(grp)))
    return np.array(out, complex)


def _Fyy(f, z, y):
    A = f.A
    out = 0j
    for k in range(2, f.n + 1):
        out += k * (k - 1) * complex(polyval(A[:, k], z)) * y ** (k - 2)
    return out


def _Fzy(f, z, y):
    A = f.A
    out = 0j
    for k in range(1, f.n + 1):
        out += k * complex(polyval(polyder(A[:, k]), z)) * y ** (k - 1)
    return out


def _sylvester_disc(c: np.ndarray) -> complex:
    """Resultant of ``p`` and ``p'`` via the Sylvester matrix."""
    p = c[::-1]
    dp = polyder(c)[::-1]
    m, k = len(p) - 1, len(dp) - 1
    S = np.zeros((m + k, m + k), complex)
    for i in range(k):
        S[i, i:i + m + 1] = p
    for i in range(m):
        S[k + i, i:i + k + 1] = dp
    return complex(np.linalg.det(S))


def _dedupe(pts: np.ndarray, rel: float = 1e-7) -> np.ndarray:
    out: list[complex] = []
    for p in np.atleast_1d(pts):
        if not np.isfinite(p):
            continue
        if not any(abs(p - q) <= rel * (1 + abs(q)) for q in out):
            out.append(complex(p))
    out.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    return np.array(out, complex)


# ---------------------------------------------------------------------------
# germs


@dataclass
class BranchGerm:
    """Truncated Taylor jet of one branch at ``base``.

    ``sheet`` is the sheet variable (the preimage ``x`` for composite
    functions, the value itself otherwise).
    """

    base: complex
    jet: np.ndarray
    source: AlgebraicFunctionDef = field(repr=False)
    sheet: complex = 0j

    @property
    def value(self) -> complex:
        return complex(self.jet[0])

    def equals(self, other: "BranchGerm", rel: float | None = None) -> bool:
        rel = rel if rel is not None else self.source.tol.eps_jet
        scale = max(1.0, float(np.max(np.abs(self.jet))), float(np.max(np.abs(other.jet))))
        return abs(self.base - other.base) < 1e-12 * (1 + abs(self.base)) and bool(
            np.all(np.abs(self.jet - other.jet) <= rel * scale))

    def evaluate(self, z) -> np.ndarray:
        h = np.asarray(z) - self.base
        return polyval(self.jet, h)

    def to_json(self) -> dict:
        return {"base": [self.base.real, self.base.imag],
                "jet": [[float(c.real), float(c.imag)] for c in self.jet]}


def jet_at(f: AlgebraicFunctionDef, z0: complex, y0: complex, order: int) -> np.ndarray:
    """Taylor jet of the branch through sheet value ``y0`` at ``z0`` (series Newton)."""
    N = order + 1
    y = np.zeros(N, complex)
    y[0] = y0
    h = np.zeros(N, complex)
    if N > 1:
        h[1] = 1.0
    if f.kind == "composite":
        Ps = f.P
        dP = f._dP
        zs = np.zeros(N, complex)
        zs[0] = z0
        if N > 1:
            zs[1] = 1.0
        iters = int(math.ceil(math.log2(N))) + 3
        for _ in range(iters):
            Fv = s_poly(Ps, y, N) - zs
            Fd = s_poly(dP, y, N)
            y = y - s_div(Fv, Fd, N)
        return s_poly(f.Q, y, N)
    cs = [taylor_shift(f.A[:, k], z0, N) for k in range(f.n + 1)]
    dcs = [k * cs[k] for k in range(1, f.n + 1)]
    iters = int(math.ceil(math.log2(N))) + 3
    for _ in range(iters):
        Fv = s_poly_series(cs, y, N)
        Fd = s_poly_series(dcs, y, N)
        y = y - s_div(Fv, Fd, N)
    return y


def _disc_scale(f: AlgebraicFunctionDef, z: complex) -> float:
    d = f.discriminant_points
    if len(d) == 0:
        return math.inf
    return float(np.min(np.abs(d - z)))


def _scale_of(f: AlgebraicFunctionDef) -> float:
    d = f.discriminant_points
    return 1.0 + (float(np.max(np.abs(d))) if len(d) else 0.0)


def branches_at(f: AlgebraicFunctionDef, z: complex, order: int | None = None,
                tol: Tolerances | None = None) -> list[BranchGerm]:
    """All germs of ``f`` at a regular point, in canonical slot order."""
    tol = tol or f.tol
    order = tol.jet_order if order is None else order
    z = complex(z)
    if _disc_scale(f, z) <= tol.eps_disc * _scale_of(f):
        raise NearDiscriminant("point is a discriminant point", point=z)
    ys = f.sorted_sheets(z)
    return [BranchGerm(z, jet_at(f, z, y, order), f, complex(y)) for y in ys]


def germ_from_value(f: AlgebraicFunctionDef, z: complex, w: complex, order: int | None = None) -> BranchGerm:
    """The germ at ``z`` whose value is closest to ``w``."""
    order = f.tol.jet_order if order is None else order
    ys = f.sheets(complex(z))[0]
    k = int(np.argmin(np.abs(f.value(ys) - w)))
    return BranchGerm(complex(z), jet_at(f, complex(z), ys[k], order), f, complex(ys[k]))


def germ_from_sheet(f: AlgebraicFunctionDef, z: complex, y: complex, order: int | None = None) -> BranchGerm:
    order = f.tol.jet_order if order is None else order
    ys = f.sheets(complex(z))[0]
    k = int(np.argmin(np.abs(ys - y)))
    return BranchGerm(complex(z), jet_at(f, complex(z), ys[k], order), f, complex(ys[k]))


# ---------------------------------------------------------------------------
# tracking


def _min_sep(y: np.ndarray) -> float:
    if len(y) < 2:
        return math.inf
    d = np.abs(y[:, None] - y[None, :])
    d[np.diag_indices(len(y))] = math.inf
    return float(d.min())


def track_segment(f: AlgebraicFunctionDef, seg: Segment, y0: complex, s0: float = 0.0, s1: float = 1.0,
                  tol: Tolerances | None = None, record: bool = False, stop_radius: float = 0.0,
                  stop_point: complex | None = None):
    """Continue the sheet value ``y0`` along ``seg`` from ``s0`` to ``s1``.

    Predictor: first-order Taylor step.  Corrector: root closest to the
    prediction, accepted only if it is closer than half the minimal root
    separation.  Returns ``(y_end, samples)`` where ``samples`` is a list of
    ``(s, y)`` when ``record`` is set.  When ``stop_point`` is given, tracking
    stops as soon as the path comes within ``stop_radius`` of it.
    """
    tol = tol or f.tol
    y = complex(y0)
    s = float(s0)
    direction = 1.0 if s1 >= s0 else -1.0
    samples = [(s, y)] if record else None
    if f.n == 1:
        if record:
            ss = np.linspace(s0, s1, 33)
            ys = f.sheets(seg.point(ss))[:, 0]
            samples = list(zip(ss.tolist(), ys.tolist()))
            return complex(ys[-1]), samples
        return complex(f.sheets(complex(seg.point(s1)))[0, 0]), samples
    disc = f.discriminant_points
    z = complex(seg.point(s))
    total = abs(s1 - s0)
    h = None
    floor = tol.step_floor
    while direction * (s1 - s) > 1e-15:
        dz_ds = abs(complex(seg.deriv(s))) or 1.0
        dist = float(np.min(np.abs(disc - z))) if len(disc) else math.inf
        cap = 0.1 * dist / dz_ds if np.isfinite(dist) else total
        cap = min(cap, total / 4.0 if total > 0 else cap, 0.25)
        if h is None:
            h = cap
        h = min(h, cap)
        if h < floor:
            raise PathTooClose("tracking step underflow near a discriminant point", z=z, dist=dist)
        sn = s + direction * min(h, abs(s1 - s))
        zn = complex(seg.point(sn))
        fy = complex(f.Fy(z, y))
        slope = -complex(f.Fz(z, y)) / fy if fy != 0 else 0j
        pred = y + slope * (zn - z)
        ys = f.sheets(zn)[0]
        dd = np.abs(ys - pred)
        k = int(np.argmin(dd))
        sep = _min_sep(ys)
        if dd[k] < 0.5 * sep and dd[k] < 0.25 * (abs(ys[k] - y) + 1e-3 * (1 + abs(y))) + 0.1 * sep:
            s, z, y = sn, zn, complex(ys[k])
            if record:
                samples.append((s, y))
            h = h * 1.6
            if stop_point is not None and abs(z - stop_point) <= stop_radius:
                break
        else:
            h = h * 0.5
            if h < floor:
                raise TrackingAmbiguity("branch separation test failed at minimal step", z=zn)
    return y, samples


def track_path(f: AlgebraicFunctionDef, path: PiecewisePath, y0: complex, tol: Tolerances | None = None) -> complex:
    y = complex(y0)
    for seg in path.segments:
        y, _ = track_segment(f, seg, y, 0.0, 1.0, tol)
    return y


def continue_branch(germ: BranchGerm, path: PiecewisePath, tol: Tolerances | None = None) -> BranchGerm:
    """Analytic continuation of ``germ`` along ``path`` (which starts at its base)."""
    f = germ.source
    tol = tol or f.tol
    if abs(path.start - germ.base) > 1e-9 * (1 + abs(germ.base)):
        raise SchemaError("path does not start at the germ's base point")
    scale = _scale_of(f)
    for p in f.discriminant_points:
        if path.distance(p) <= tol.eps_disc * scale:
            raise PathTooClose("path meets a discriminant point", point=complex(p))
    y = track_path(f, path, germ.sheet, tol)
    end = path.end
    return BranchGerm(end, jet_at(f, end, y, len(germ.jet) - 1), f, y)


def transport_slots(f: AlgebraicFunctionDef, path: PiecewisePath, tol: Tolerances | None = None) -> list[int]:
    """Permutation of canonical slots induced by continuation along ``path``.

    ``perm[i] = j`` means slot ``i`` at the start continues to slot ``j`` at the end.
    """
    start = f.sorted_sheets(path.start)
    end = f.sorted_sheets(path.end)
    perm = []
    for y in start:
        y1 = track_path(f, path, y, tol)
        perm.append(int(np.argmin(np.abs(end - y1))))
    return perm


# ---------------------------------------------------------------------------
# loops and monodromy


def loop_around(c: complex, p: complex, r: float, tol: Tolerances = DEFAULT) -> PiecewisePath:
    """Straight tail from ``c`` toward ``p`` to radius ``r``, CCW circle, tail back."""
    c, p = complex(c), complex(p)
    d = c - p
    u = d / abs(d)
    q = p + r * u
    th = math.atan2(u.imag, u.real)
    return PiecewisePath([LineSegment(c, q), ArcSegment(p, r, th, 2 * math.pi), LineSegment(q, c)], True, tol)


def default_radii(punctures: Sequence[complex], features: Sequence[complex] = (), gamma: PiecewisePath | None = None,
                  on_gamma: Sequence[bool] | None = None) -> list[float]:
    pts = [complex(p) for p in punctures]
    out = []
    for i, p in enumerate(pts):
        others = [abs(p - q) for j, q in enumerate(pts) if j != i and abs(p - q) > 0]
        others += [abs(p - q) for q in features if abs(p - q) > 1e-12]
        d = min(others) if others else 1.0
        if gamma is not None and not (on_gamma and on_gamma[i]):
            dg = gamma.distance(p)
            if dg > 1e-9:
                d = min(d, dg)
        out.append(0.25 * d)
    return out


@dataclass
class MonodromyReport:
    basepoint: complex
    punctures: list
    loops: list
    permutations: list
    transitive: bool
    doubly_transitive: bool
    group_order: int
    order_exact: bool
    infinity_permutation: list
    product_check: bool

    def to_json(self) -> dict:
        return {
            "basepoint": [self.basepoint.real, self.basepoint.imag],
            "punctures": [[p.real, p.imag] for p in self.punctures],
            "permutations": self.permutations,
            "transitive": self.transitive,
            "doubly_transitive": self.doubly_transitive,
            "group_order": self.group_order,
            "order_exact": self.order_exact,
            "infinity_permutation": self.infinity_permutation,
            "product_check": self.product_check,
        }


def compose(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Path product: first ``a`` then ``b``."""
    return [b[a[i]] for i in range(len(a))]


def invert(a: Sequence[int]) -> list[int]:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return out


def enumerate_group(gens: Sequence[Sequence[int]], cap: int = 10080):
    """Closure of ``gens`` under composition; returns ``(elements, exact)``."""
    n = len(gens[0]) if gens else 0
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                e = tuple(compose(g, h))
                if e not in seen:
                    seen.add(e)
                    if len(seen) >= cap:
                        return seen, False
                    nxt.append(e)
        frontier = nxt
    return seen, True


def orbit_transitive(gens: Sequence[Sequence[int]], n: int) -> bool:
    if n <= 1:
        return True
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for g in gens:
            for j in (g[i], invert(g)[i]):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    return len(seen) == n


def doubly_transitive(gens: Sequence[Sequence[int]], n: int) -> bool:
    """Transitivity on ordered pairs of distinct slots."""
    if n <= 2:
        return orbit_transitive(gens, n)
    inv = [invert(g) for g in gens]
    allg = list(gens) + inv
    start = (0, 1)
    seen = {start}
    stack = [start]
    while stack:
        i, j = stack.pop()
        for g in allg:
            q = (g[i], g[j])
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return len(seen) == n * (n - 1)


def angular_order(c: complex, pts: Sequence[complex], ref_angle: float = 0.0) -> list[int]:
    ang = [((math.atan2((p - c).imag, (p - c).real) - ref_angle) % (2 * math.pi)) for p in pts]
    return sorted(range(len(pts)), key=lambda i: (ang[i], abs(pts[i] - c)))


def check_tails(c: complex, punctures: Sequence[complex], radii: Sequence[float]) -> None:
    from .errors import NotAdmissible

    for i, p in enumerate(punctures):
        seg = LineSegment(c, p + radii[i] * (c - p) / abs(c - p))
        for j, q in enumerate(punctures):
            if j == i:
                continue
            from .paths import _distance_to_segment

            if _distance_to_segment(seg, q) <= 1.05 * radii[j]:
                raise NotAdmissible("loop tail passes too close to another puncture; choose another basepoint",
                                    tail=i, puncture=j)


def _widest_gap(c: complex, pts: Sequence[complex]) -> float:
    """Direction from ``c`` bisecting the widest angular gap between the punctures."""
    if not pts:
        return 0.0
    th = sorted(math.atan2((p - c).imag, (p - c).real) for p in pts)
    gaps = [(th[(i + 1) % len(th)] - th[i]) % (2 * math.pi) or 2 * math.pi for i in range(len(th))]
    i = int(np.argmax(gaps))
    return th[i] + 0.5 * gaps[i]


def monodromy_generators(f: AlgebraicFunctionDef, basepoint: complex, punctures: Sequence[complex] | None = None,
                         tol: Tolerances | None = None) -> MonodromyReport:
    """Generator loops around each puncture with their slot permutations."""
    tol = tol or f.tol
    c = complex(basepoint)
    pts = [complex(p) for p in (f.discriminant_points if punctures is None else punctures)]
    if _disc_scale(f, c) <= tol.eps_disc * _scale_of(f):
        raise NearDiscriminant("basepoint is singular", point=c)
    ref = _widest_gap(c, pts)
    order = angular_order(c, pts, ref)
    pts = [pts[i] for i in order]
    radii = default_radii(pts)
    check_tails(c, pts, radii)
    loops, perms = [], []
    for p, r in zip(pts, radii):
        L = loop_around(c, p, r, tol)
        loops.append(L)
        perms.append(transport_slots(f, L, tol))
    n = f.n
    gens = perms or [list(range(n))]
    elems, exact = enumerate_group(gens, tol.group_cap)
    # loop around everything
    R = 2.0 * max([abs(p - c) for p in pts] + [1.0]) + 1.0
    u = cmath.exp(1j * ref)
    big = PiecewisePath([LineSegment(c, c + R * u), ArcSegment(c, R, ref, 2 * math.pi), LineSegment(c + R * u, c)],
                        True, tol)
    inf_perm = transport_slots(f, big, tol) if pts else list(range(n))
    prod = list(range(n))
    for g in perms:
        prod = compose(prod, g)
    return MonodromyReport(c, pts, loops, perms, orbit_transitive(gens, n), doubly_transitive(gens, n), len(elems),
                           exact, inf_perm, prod == inf_perm)


# ---------------------------------------------------------------------------
# ramification


@dataclass
class RamificationProfile:
    """Cycle structure and regular parts at a point.

    ``cycles`` holds ``(length, members)`` with members given as canonical
    slots at ``base`` (a point at distance ``radius`` from ``point``);
    ``regular_parts[i]`` is the jet of the cycle average in powers of
    ``z - point``.
    """

    point: complex
    cycles: list
    regular_parts: list
    residuals: list
    base: complex
    radius: float

    def cycle_of(self, slot: int) -> int:
        for i, (_, mem) in enumerate(self.cycles):
            if slot in mem:
                return i
        raise KeyError(slot)

    def to_json(self) -> dict:
        return {
            "point": [self.point.real, self.point.imag],
            "cycles": [[ln, list(m)] for ln, m in self.cycles],
            "regular_parts": [[[float(c.real), float(c.imag)] for c in g] for g in self.regular_parts],
            "residuals": self.residuals,
        }


def _cycles(perm: Sequence[int]):
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen:
            continue
        cyc = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        out.append((len(cyc), cyc))
    return out


def local_radius(f: AlgebraicFunctionDef, z0: complex, extra: Sequence[complex] = ()) -> float:
    others = [abs(p - z0) for p in list(f.discriminant_points) + list(extra) if abs(p - z0) > 1e-9 * (1 + abs(z0))]
    return 0.1 * (min(others) if others else 1.0)


def ramification_profile(f: AlgebraicFunctionDef, z0: complex, jet_order: int | None = None,
                         tol: Tolerances | None = None, radius: float | None = None,
                         angle: float = 0.3) -> RamificationProfile:
    """Local monodromy cycles at ``z0`` and the regular part of each cycle."""
    tol = tol or f.tol
    J = tol.jet_order if jet_order is None else jet_order
    z0 = complex(z0)
    rho = radius if radius is not None else local_radius(f, z0)
    M = max(4 * J, 32)
    base = z0 + rho * complex(math.cos(angle), math.sin(angle))
    slots = f.sorted_sheets(base)
    n = len(slots)
    # track every slot once around, sampling at M angles
    traj = np.zeros((n, M), complex)
    arcs = [ArcSegment(z0, rho, angle + 2 * math.pi * k / M, 2 * math.pi / M) for k in range(M)]
    perm = []
    for i, y in enumerate(slots):
        cur = complex(y)
        for k in range(M):
            traj[i, k] = f.value(cur)
            cur, _ = track_segment(f, arcs[k], cur, 0.0, 1.0, tol)
        perm.append(int(np.argmin(np.abs(slots - cur))))
    cycles = _cycles(perm)
    regs, resids = [], []
    th = angle + 2 * math.pi * np.arange(M) / M
    h = rho * np.exp(1j * th)
    V = np.stack([h ** m for m in range(J + 1)], axis=1)
    for ln, mem in cycles:
        # cycle average is single valued: at angle k the members of the cycle
        # continued k steps are again the cycle members
        avg = np.zeros(M, complex)
        for i in mem:
            avg += traj[i]
        avg /= ln
        coef, *_ = np.linalg.lstsq(V, avg, rcond=None)
        res = float(np.sqrt(np.mean(np.abs(V @ coef - avg) ** 2)) / max(1.0, float(np.sqrt(np.mean(np.abs(avg) ** 2)))))
        regs.append(coef)
        resids.append(res)
    if max(resids) > tol.eps_jet * 100 and max(resids) > 1e-6:
        raise FitResidualTooLarge("regular part fit residual too large", residual=max(resids))
    return RamificationProfile(z0, cycles, regs, resids, base, rho)


# ---------------------------------------------------------------------------
# pushforward


class MappedSegment(ParametricSegment):
    """Image ``P(x(s))`` of a segment ``x`` of the source curve."""

    def __init__(self, P: np.ndarray, source: Segment):
        self.P = np.asarray(P, complex)
        self.dP = polyder(self.P)
        self.source = source
        P_, dP_, src = self.P, self.dP, source
        super().__init__(lambda s: polyval(P_, src.point(s)),
                         lambda s: polyval(dP_, src.point(s)) * src.deriv(s), "P(Gamma)")

    def sheet(self, s):
        return self.source.point(s)

    def reversed(self) -> "MappedSegment":
        return MappedSegment(self.P, self.source.reversed())


def pushforward_assignment(P, Q, Gamma: PiecewisePath, tol: Tolerances | None = None):
    """Image curve ``gamma = P(Gamma)`` with the sheet seeds of ``g = Q(P^{-1})``.

    Returns ``(gamma, f, seeds, sigma)`` where ``seeds[k]`` is the sheet value
    (a preimage ``x``) at the midpoint of piece ``k``.
    """
    tol = tol or Gamma.tol
    f = AlgebraicFunctionDef.composite(P, Q, tol=tol)
    crit = poly_roots(f._dP)
    eps = max(Gamma.eps, 1e-12) * 10
    for cpt in crit:
        d = Gamma.distance(cpt)
        if d <= eps:
            if not any(abs(cpt - e) <= eps for e in [Gamma.start, Gamma.end]):
                raise CriticalPointOnPath("interior critical point of P on Gamma", point=complex(cpt))
    segs = [MappedSegment(f.P, s) for s in Gamma.segments]
    gamma = PiecewisePath(segs, None, tol)
    seeds = [complex(s.source.point(0.5)) for s in segs]
    sigma = [complex(polyval(f.P, Gamma.start)), complex(polyval(f.P, Gamma.end))]
    return gamma, f, seeds, sigma
