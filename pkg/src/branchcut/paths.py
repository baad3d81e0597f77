"""Oriented piecewise curves, crossings, winding numbers and region bookkeeping.

A :class:`PiecewisePath` is an ordered tuple of elementary segments, each
parametrised over ``s in [0, 1]``.  Geometry that needs a discrete picture
(intersections, faces of the arrangement) works on a fine polyline sample and
refines every intersection by Newton's method on the exact parametrisations.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    NotAdmissible,
    NotClosed,
    OverlapDetected,
    PointOnCurve,
    SchemaError,
    TangentialIntersection,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# segments


class Segment:
    """Analytic arc ``s -> z(s)`` on ``[0, 1]``."""

    kind = "segment"

    def point(self, s):
        raise NotImplementedError

    def deriv(self, s):
        raise NotImplementedError

    @property
    def start(self) -> complex:
        return complex(self.point(0.0))

    @property
    def end(self) -> complex:
        return complex(self.point(1.0))

    def length(self) -> float:
        x, w = _gl_nodes(32)
        s = 0.5 * (x + 1.0)
        return float(0.5 * np.sum(w * np.abs(self.deriv(s))))

    def sample_params(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, 65)

    def reversed(self) -> "Segment":
        raise NotImplementedError

    def to_json(self) -> dict:
        pts = self.point(self.sample_params())
        return {"kind": "polyline", "points": [[float(z.real), float(z.imag)] for z in pts]}


class LineSegment(Segment):
    kind = "line"

    def __init__(self, p: complex, q: complex):
        self.p = complex(p)
        self.q = complex(q)

    def point(self, s):
        return self.p + (self.q - self.p) * np.asarray(s)

    def deriv(self, s):
        return (self.q - self.p) * np.ones_like(np.asarray(s, dtype=float))

    def length(self) -> float:
        return abs(self.q - self.p)

    def sample_params(self) -> np.ndarray:
        return np.array([0.0, 1.0])

    def reversed(self) -> "LineSegment":
        return LineSegment(self.q, self.p)

    def to_json(self) -> dict:
        return {"kind": "line", "points": [[self.p.real, self.p.imag], [self.q.real, self.q.imag]]}

    def __repr__(self) -> str:
        return f"LineSegment({self.p}, {self.q})"


class ArcSegment(Segment):
    """Circular arc ``center + radius * exp(i (theta0 + s * sweep))``."""

    kind = "arc"

    def __init__(self, center: complex, radius: float, theta0: float, sweep: float):
        self.center = complex(center)
        self.radius = float(radius)
        self.theta0 = float(theta0)
        self.sweep = float(sweep)

    @classmethod
    def from_points(cls, start: complex, end: complex, center: complex, ccw: bool = True, turns: int = 0):
        start, end, center = complex(start), complex(end), complex(center)
        r = abs(start - center)
        if abs(abs(end - center) - r) > 1e-9 * max(1.0, r):
            raise SchemaError("arc endpoints are not equidistant from the center")
        a0 = math.atan2((start - center).imag, (start - center).real)
        a1 = math.atan2((end - center).imag, (end - center).real)
        d = (a1 - a0) % TWO_PI
        if ccw:
            sweep = d if d > 1e-12 else TWO_PI
        else:
            sweep = -((-d) % TWO_PI) if d > 1e-12 else -TWO_PI
        sweep += (TWO_PI if ccw else -TWO_PI) * turns
        return cls(center, r, a0, sweep)

    @classmethod
    def circle(cls, center: complex, radius: float, ccw: bool = True, theta0: float = 0.0):
        return cls(center, radius, theta0, TWO_PI if ccw else -TWO_PI)

    def point(self, s):
        return self.center + self.radius * np.exp(1j * (self.theta0 + self.sweep * np.asarray(s)))

    def deriv(self, s):
        return 1j * self.sweep * self.radius * np.exp(1j * (self.theta0 + self.sweep * np.asarray(s)))

    def length(self) -> float:
        return abs(self.sweep) * self.radius

    def sample_params(self) -> np.ndarray:
        n = max(8, int(math.ceil(abs(self.sweep) / math.radians(1.0))))
        return np.linspace(0.0, 1.0, n + 1)

    def reversed(self) -> "ArcSegment":
        return ArcSegment(self.center, self.radius, self.theta0 + self.sweep, -self.sweep)

    def to_json(self) -> dict:
        s, e = self.start, self.end
        d = {
            "kind": "arc",
            "points": [[s.real, s.imag], [e.real, e.imag]],
            "center": [self.center.real, self.center.imag],
            "ccw": bool(self.sweep > 0),
        }
        extra = int(abs(self.sweep) // TWO_PI) - (1 if abs(abs(self.sweep) % TWO_PI) < 1e-12 else 0)
        if extra > 0:
            d["turns"] = extra
        return d

    def __repr__(self) -> str:
        return f"ArcSegment(c={self.center}, r={self.radius}, th0={self.theta0:.4g}, sweep={self.sweep:.4g})"


class ParametricSegment(Segment):
    """Smooth arc given by vectorised callables ``f`` and ``df``."""

    kind = "parametric"

    def __init__(self, f: Callable, df: Callable, label: str = "parametric"):
        self.f = f
        self.df = df
        self.label = label
        self._params = None
        self._length = None

    def point(self, s):
        return self.f(np.asarray(s, dtype=float))

    def deriv(self, s):
        return self.df(np.asarray(s, dtype=float))

    def length(self) -> float:
        if self._length is None:
            s = self.sample_params()
            x, w = _gl_nodes(16)
            tot = 0.0
            for a, b in zip(s[:-1], s[1:]):
                ss = a + (b - a) * 0.5 * (x + 1.0)
                tot += 0.5 * (b - a) * float(np.sum(w * np.abs(self.deriv(ss))))
            self._length = tot
        return self._length

    def sample_params(self) -> np.ndarray:
        if self._params is not None:
            return self._params
        s = np.linspace(0.0, 1.0, 129)
        for _ in range(14):
            z = self.point(s)
            d = self.deriv(s)
            turn = np.abs(np.angle(d[1:] / d[:-1]))
            chord = np.abs(np.diff(z))
            scale = max(float(np.max(np.abs(z - z.mean()))), 1e-300)
            bad = (turn > math.radians(1.0)) | (chord > scale / 150.0)
            if not bad.any():
                break
            mids = 0.5 * (s[:-1][bad] + s[1:][bad])
            s = np.sort(np.concatenate([s, mids]))
        self._params = s
        return s

    def reversed(self) -> "ParametricSegment":
        f, df = self.f, self.df
        return ParametricSegment(lambda s: f(1.0 - s), lambda s: -df(1.0 - s), self.label + "^-1")

    def __repr__(self) -> str:
        return f"ParametricSegment({self.label})"


_GL_CACHE: dict = {}


def _gl_nodes(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


# ---------------------------------------------------------------------------
# path


@dataclass(frozen=True)
class Crossing:
    """A transversal intersection point with its two parameters and sign.

    ``param_a``/``param_b`` are global arc-length parameters; ``piece_a``,
    ``s_a`` (and ``_b``) locate the point on the individual segments.
    """

    point: complex
    param_a: float
    param_b: float
    sign: int
    piece_a: int = -1
    piece_b: int = -1
    s_a: float = 0.0
    s_b: float = 0.0
    angle: float = 0.0

    def to_json(self) -> dict:
        return {
            "point": [self.point.real, self.point.imag],
            "param_a": self.param_a,
            "param_b": self.param_b,
            "sign": self.sign,
            "piece_a": self.piece_a,
            "piece_b": self.piece_b,
        }


class PiecewisePath:
    """Ordered, oriented, piecewise-smooth curve.

    Parameters
    ----------
    segments : sequence of Segment
    closed : bool
        Whether the last endpoint returns to the first one.
    tol : Tolerances, optional
    """

    def __init__(self, segments: Sequence[Segment], closed=None, tol: Tolerances = DEFAULT,
                 breaks: Sequence[int] | None = None):
        segs = tuple(segments)
        if not segs:
            raise SchemaError("a path needs at least one segment")
        self.segments = segs
        self.tol = tol
        pts = np.concatenate([s.point(s.sample_params()) for s in segs])
        self.diameter = float(max(np.ptp(pts.real), np.ptp(pts.imag), 1e-12) * math.sqrt(2.0))
        self.eps = tol.eps_geom * max(self.diameter, 1e-300)
        gap_tol = max(self.eps, 1e-12) * 10
        starts = sorted(set([0] + list(breaks or [])))
        bounds = list(zip(starts, starts[1:] + [len(segs)]))
        if isinstance(closed, (list, tuple)):
            flags = list(closed)
        else:
            flags = [closed] * len(bounds)
        if len(flags) != len(bounds):
            raise SchemaError("one closed flag per component is required")
        comps = []
        for (i0, i1), flag in zip(bounds, flags):
            for i in range(i0, i1 - 1):
                if abs(segs[i].end - segs[i + 1].start) > gap_tol:
                    raise SchemaError(f"segments {i} and {i + 1} do not join", gap=abs(segs[i].end - segs[i + 1].start))
            returns = abs(segs[i1 - 1].end - segs[i0].start) <= gap_tol
            if flag is None:
                flag = returns
            if flag and not returns:
                raise NotClosed("closed flag set but a component does not return to its start")
            comps.append((i0, i1, bool(flag)))
        self.components = tuple(comps)
        self.closed = all(c[2] for c in comps)
        self._comp_of = np.zeros(len(segs), dtype=int)
        for ci, (i0, i1, _) in enumerate(comps):
            self._comp_of[i0:i1] = ci
        self.lengths = np.array([s.length() for s in segs])
        self.offsets = np.concatenate([[0.0], np.cumsum(self.lengths)])

    def next_piece(self, k: int):
        i0, i1, cl = self.components[self._comp_of[k]]
        if k + 1 < i1:
            return k + 1
        return i0 if cl else None

    def prev_piece(self, k: int):
        i0, i1, cl = self.components[self._comp_of[k]]
        if k > i0:
            return k - 1
        return i1 - 1 if cl else None

    def component_paths(self) -> list["PiecewisePath"]:
        return [PiecewisePath(self.segments[i0:i1], cl, self.tol) for i0, i1, cl in self.components]

    @property
    def breaks(self) -> list[int]:
        return [c[0] for c in self.components]

    # basic accessors ------------------------------------------------------
    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    @property
    def total_length(self) -> float:
        return float(self.offsets[-1])

    def global_param(self, piece: int, s: float) -> float:
        return float(self.offsets[piece] + s * self.lengths[piece])

    def locate_param(self, p: float):
        """Inverse of :meth:`global_param` (uses a linear-in-s approximation)."""
        i = int(np.searchsorted(self.offsets, p, side="right") - 1)
        i = min(max(i, 0), len(self.segments) - 1)
        L = self.lengths[i]
        return i, (0.0 if L == 0 else float((p - self.offsets[i]) / L))

    def point_at(self, piece: int, s: float) -> complex:
        return complex(self.segments[piece].point(s))

    def reversed(self) -> "PiecewisePath":
        if len(self.components) == 1:
            return PiecewisePath([s.reversed() for s in reversed(self.segments)], self.closed, self.tol)
        parts = [p.reversed() for p in self.component_paths()]
        return PiecewisePath.union(parts)

    def concat(self, other: "PiecewisePath", closed: bool | None = None) -> "PiecewisePath":
        return PiecewisePath(list(self.segments) + list(other.segments), closed, self.tol)

    @classmethod
    def union(cls, parts: Sequence["PiecewisePath"], tol: Tolerances | None = None) -> "PiecewisePath":
        """Disjoint union of paths, one component per part."""
        segs, breaks, flags = [], [], []
        for p in parts:
            for i0, i1, cl in p.components:
                breaks.append(len(segs))
                flags.append(cl)
                segs.extend(p.segments[i0:i1])
        return cls(segs, flags, tol or parts[0].tol, breaks)

    def endpoints(self) -> list[complex]:
        """Start and end points of the open components."""
        out = []
        for i0, i1, cl in self.components:
            if not cl:
                out += [self.segments[i0].start, self.segments[i1 - 1].end]
        return out

    def sample(self):
        """Polyline sample: list of ``(s_array, z_array)`` per segment."""
        out = []
        for seg in self.segments:
            s = seg.sample_params()
            out.append((s, seg.point(s)))
        return out

    def radius(self, center: complex = 0j) -> float:
        pts = np.concatenate([z for _, z in self.sample()])
        return float(np.max(np.abs(pts - center)))

    def centroid(self) -> complex:
        pts = np.concatenate([z for _, z in self.sample()])
        return complex(0.5 * (pts.real.min() + pts.real.max()), 0.5 * (pts.imag.min() + pts.imag.max()))

    def distance(self, z: complex) -> float:
        return _distance_to_path(self, complex(z))

    # json -------------------------------------------------------------------
    def to_json(self) -> dict:
        if len(self.components) > 1:
            return {"components": [p.to_json() for p in self.component_paths()]}
        return {"closed": self.closed, "segments": [s.to_json() for s in self.segments]}

    @classmethod
    def from_json(cls, d: dict, tol: Tolerances = DEFAULT) -> "PiecewisePath":
        if isinstance(d, dict) and "components" in d:
            return cls.union([cls.from_json(c, tol) for c in d["components"]], tol)
        if not isinstance(d, dict) or "segments" not in d:
            raise SchemaError("path must be an object with a 'segments' array")
        segs: list[Segment] = []
        for k, sd in enumerate(d["segments"]):
            kind = sd.get("kind")
            pts = [_cx(p, f"segments[{k}].points") for p in sd.get("points", [])]
            if kind == "line":
                if len(pts) != 2:
                    raise SchemaError(f"segments[{k}]: a line needs two points")
                segs.append(LineSegment(pts[0], pts[1]))
            elif kind == "polyline":
                if len(pts) < 2:
                    raise SchemaError(f"segments[{k}]: a polyline needs at least two points")
                segs.extend(LineSegment(a, b) for a, b in zip(pts[:-1], pts[1:]))
            elif kind == "arc":
                if "center" not in sd or len(pts) != 2:
                    raise SchemaError(f"segments[{k}]: an arc needs two points and a center")
                segs.append(
                    ArcSegment.from_points(
                        pts[0], pts[1], _cx(sd["center"], f"segments[{k}].center"),
                        bool(sd.get("ccw", True)), int(sd.get("turns", 0)),
                    )
                )
            else:
                raise SchemaError(f"segments[{k}]: unknown kind {kind!r}")
        return cls(segs, d.get("closed"), tol)

    # constructors -----------------------------------------------------------
    @classmethod
    def polyline(cls, points: Iterable[complex], closed: bool | None = None, tol: Tolerances = DEFAULT):
        pts = [complex(p) for p in points]
        return cls([LineSegment(a, b) for a, b in zip(pts[:-1], pts[1:])], closed, tol)

    @classmethod
    def circle(cls, center: complex = 0j, radius: float = 1.0, ccw: bool = True, theta0: float = 0.0,
               tol: Tolerances = DEFAULT):
        return cls([ArcSegment.circle(center, radius, ccw, theta0)], True, tol)

    @classmethod
    def segment(cls, p: complex, q: complex, tol: Tolerances = DEFAULT):
        return cls([LineSegment(p, q)], False, tol)

    def __repr__(self) -> str:
        return f"PiecewisePath({len(self.segments)} segments, closed={self.closed})"


def _cx(p, where: str) -> complex:
    try:
        if isinstance(p, (int, float)):
            return complex(p)
        return complex(float(p[0]), float(p[1]))
    except Exception as exc:  # noqa: BLE001
        raise SchemaError(f"{where}: expected [re, im]") from exc


def _distance_to_segment(seg: Segment, z: complex) -> float:
    if isinstance(seg, LineSegment):
        d = seg.q - seg.p
        if d == 0:
            return abs(z - seg.p)
        s = min(max(((z - seg.p) * d.conjugate()).real / abs(d) ** 2, 0.0), 1.0)
        return abs(z - (seg.p + s * d))
    if isinstance(seg, ArcSegment):
        w = z - seg.center
        ang = math.atan2(w.imag, w.real)
        rel = (ang - seg.theta0) / seg.sweep
        best = min(abs(z - seg.start), abs(z - seg.end))
        for k in range(-3, 4):
            s = rel + k * TWO_PI / seg.sweep
            if 0.0 <= s <= 1.0:
                best = min(best, abs(abs(w) - seg.radius))
                break
        return best
    s = seg.sample_params()
    pts = seg.point(s)
    i = int(np.argmin(np.abs(pts - z)))
    lo, hi = s[max(i - 1, 0)], s[min(i + 1, len(s) - 1)]
    ss = np.linspace(lo, hi, 201)
    return float(np.min(np.abs(seg.point(ss) - z)))


def _distance_to_path(path: PiecewisePath, z: complex) -> float:
    return min(_distance_to_segment(seg, z) for seg in path.segments)


# ---------------------------------------------------------------------------
# intersections


def _edges(path: PiecewisePath):
    """Flattened polyline edges: arrays (piece, s0, s1, z0, z1)."""
    piece, s0, s1, z0, z1 = [], [], [], [], []
    for k, (s, z) in enumerate(path.sample()):
        piece.append(np.full(len(s) - 1, k))
        s0.append(s[:-1])
        s1.append(s[1:])
        z0.append(z[:-1])
        z1.append(z[1:])
    return (np.concatenate(piece), np.concatenate(s0), np.concatenate(s1),
            np.concatenate(z0), np.concatenate(z1))


def _edge_pairs(A, B, same: bool, chunk: int = 512):
    """Candidate intersecting edge pairs by bounding boxes and orientation tests."""
    _, _, _, a0, a1 = A
    _, _, _, b0, b1 = B
    bx0 = np.minimum(b0.real, b1.real)
    bx1 = np.maximum(b0.real, b1.real)
    by0 = np.minimum(b0.imag, b1.imag)
    by1 = np.maximum(b0.imag, b1.imag)
    scale = max(float(np.max(np.abs(np.concatenate([a0, a1, b0, b1])))), 1.0)
    pad = 1e-12 * scale
    out_i, out_j = [], []
    for c in range(0, len(a0), chunk):
        p0, p1 = a0[c:c + chunk, None], a1[c:c + chunk, None]
        ax0 = np.minimum(p0.real, p1.real) - pad
        ax1 = np.maximum(p0.real, p1.real) + pad
        ay0 = np.minimum(p0.imag, p1.imag) - pad
        ay1 = np.maximum(p0.imag, p1.imag) + pad
        box = (ax0 <= bx1) & (bx0 <= ax1) & (ay0 <= by1) & (by0 <= ay1)
        ii, jj = np.nonzero(box)
        if len(ii) == 0:
            continue
        ii = ii + c
        if same:
            keep = jj > ii
            ii, jj = ii[keep], jj[keep]
        pa, pb, qa, qb = a0[ii], a1[ii], b0[jj], b1[jj]
        d1 = _cross(pb - pa, qa - pa)
        d2 = _cross(pb - pa, qb - pa)
        d3 = _cross(qb - qa, pa - qa)
        d4 = _cross(qb - qa, pb - qa)
        eps = 1e-13 * scale * scale
        hit = (d1 * d2 <= eps) & (d3 * d4 <= eps)
        out_i.append(ii[hit])
        out_j.append(jj[hit])
    if not out_i:
        return np.zeros(0, int), np.zeros(0, int)
    return np.concatenate(out_i), np.concatenate(out_j)


def _cross(u, v):
    return u.real * v.imag - u.imag * v.real


def _newton_intersect(sa: Segment, sb: Segment, s: float, u: float, iters: int = 40):
    for _ in range(iters):
        f = complex(sa.point(s)) - complex(sb.point(u))
        da = complex(sa.deriv(s))
        db = -complex(sb.deriv(u))
        det = da.real * db.imag - da.imag * db.real
        if det == 0:
            return None
        ds = (f.real * db.imag - f.imag * db.real) / det
        du = (da.real * f.imag - da.imag * f.real) / det
        s -= ds
        u -= du
        if abs(ds) < 1e-15 and abs(du) < 1e-15:
            break
    return s, u


def _intersections(pa: PiecewisePath, pb: PiecewisePath, same: bool, tol: Tolerances):
    """Raw intersection records between two paths (or a path and itself)."""
    A = _edges(pa)
    B = A if same else _edges(pb)
    ii, jj = _edge_pairs(A, B, same)
    eps = max(pa.eps, pb.eps)
    recs = []
    for i, j in zip(ii, jj):
        ka, kb = int(A[0][i]), int(B[0][j])
        za0, za1, zb0, zb1 = A[3][i], A[4][i], B[3][j], B[4][j]
        da, db = za1 - za0, zb1 - zb0
        den = _cross(da, db)
        sa_seg, sb_seg = pa.segments[ka], pb.segments[kb]
        if abs(den) <= 1e-14 * abs(da) * abs(db):
            # parallel edges: overlap if collinear and overlapping
            if abs(_cross(da, zb0 - za0)) <= eps * abs(da) + 1e-300:
                t0 = ((zb0 - za0) * da.conjugate()).real / abs(da) ** 2
                t1 = ((zb1 - za0) * da.conjugate()).real / abs(da) ** 2
                lo, hi = min(t0, t1), max(t0, t1)
                if hi > 1e-9 and lo < 1 - 1e-9 and min(hi, 1) - max(lo, 0) > 1e-6:
                    if not (same and _adjacent(pa, ka, A[1][i], A[2][i], kb, B[1][j], B[2][j])):
                        raise OverlapDetected("two arcs coincide on a sub-arc", point=complex(za0))
            continue
        t = _cross(zb0 - za0, db) / den
        u = _cross(zb0 - za0, da) / den
        s_guess = A[1][i] + t * (A[2][i] - A[1][i])
        u_guess = B[1][j] + u * (B[2][j] - B[1][j])
        res = _newton_intersect(sa_seg, sb_seg, float(s_guess), float(u_guess))
        if res is None:
            continue
        s, u = res
        if not (-1e-9 <= s <= 1 + 1e-9 and -1e-9 <= u <= 1 + 1e-9):
            continue
        s = min(max(s, 0.0), 1.0)
        u = min(max(u, 0.0), 1.0)
        z = complex(sa_seg.point(s))
        if abs(z - complex(sb_seg.point(u))) > 1e3 * eps + 1e-12:
            continue
        if same and ka == kb and abs(s - u) < 1e-9:
            continue
        recs.append((ka, s, kb, u, z))
    # dedupe
    out = []
    for r in recs:
        if not any(r[0] == q[0] and r[2] == q[2] and abs(r[4] - q[4]) <= 1e3 * eps + 1e-12 for q in out):
            out.append(r)
    return out


def _adjacent(path, ka, sa0, sa1, kb, sb0, sb1) -> bool:
    if ka == kb:
        return abs(sa1 - sb0) < 1e-15 or abs(sb1 - sa0) < 1e-15
    if path.next_piece(ka) == kb and sa1 == 1.0 and sb0 == 0.0:
        return True
    if path.next_piece(kb) == ka and sb1 == 1.0 and sa0 == 0.0:
        return True
    return False


def _is_endpoint(s: float) -> bool:
    return s <= 1e-9 or s >= 1 - 1e-9


def _consecutive(path: PiecewisePath, ka: int, sa: float, kb: int, sb: float) -> bool:
    """True if the two locations are the shared endpoint of consecutive pieces."""
    if ka == kb:
        return len(path.segments) and path.next_piece(ka) == ka and _is_endpoint(sa) and _is_endpoint(sb)
    for (k1, s1, k2, s2) in ((ka, sa, kb, sb), (kb, sb, ka, sa)):
        if s1 >= 1 - 1e-9 and s2 <= 1e-9 and path.next_piece(k1) == k2:
            return True
    return False


def _tangent(seg: Segment, s: float, side: int = 0) -> complex:
    if side < 0:
        s = max(s - 1e-9, 0.0)
    elif side > 0:
        s = min(s + 1e-9, 1.0)
    d = complex(seg.deriv(s))
    return d / abs(d) if d != 0 else 0j


def crossing_sign(t_gamma: complex, t_aux: complex) -> int:
    """+1 when the auxiliary curve passes from the right of gamma to its left."""
    v = (t_gamma.conjugate() * t_aux).imag
    return 1 if v > 0 else -1


def _classify_self(path: PiecewisePath, tol: Tolerances):
    crossings, junctions = [], []
    sin_min = math.sin(tol.theta_min)
    for ka, s, kb, u, z in _intersections(path, path, True, tol):
        if ka > kb or (ka == kb and s > u):
            ka, s, kb, u = kb, u, ka, s
        if _consecutive(path, ka, s, kb, u):
            continue
        if _is_endpoint(s) or _is_endpoint(u):
            junctions.append(z)
            continue
        ta = _tangent(path.segments[ka], s)
        tb = _tangent(path.segments[kb], u)
        sang = abs((ta.conjugate() * tb).imag)
        if sang < sin_min:
            raise TangentialIntersection("tangential self-contact", point=z)
        crossings.append(
            Crossing(z, path.global_param(ka, s), path.global_param(kb, u), crossing_sign(ta, tb),
                     ka, kb, s, u, math.asin(min(sang, 1.0)))
        )
    crossings.sort(key=lambda c: c.param_a)
    uniq = []
    for z in junctions:
        if not any(abs(z - w) <= 1e3 * path.eps + 1e-12 for w in uniq):
            uniq.append(z)
    return crossings, uniq


def self_intersections(path: PiecewisePath, tol: Tolerances | None = None) -> list[Crossing]:
    """All transversal self-crossings of ``path`` sorted by the first parameter.

    Points where segment endpoints meet non-consecutively are junctions, not
    crossings; see :func:`junction_points`.
    """
    return _classify_self(path, tol or path.tol)[0]


def junction_points(path: PiecewisePath, tol: Tolerances | None = None) -> list[complex]:
    """Points where non-consecutive segment endpoints touch the path."""
    return _classify_self(path, tol or path.tol)[1]


# ---------------------------------------------------------------------------
# winding numbers


def _arg_change_line(p: complex, q: complex, z: complex) -> float:
    return math.atan2(((q - z) / (p - z)).imag, ((q - z) / (p - z)).real)


def _arg_change_arc(seg: ArcSegment, z: complex) -> float:
    n = max(1, int(math.ceil(abs(seg.sweep) / (math.pi / 2))))
    total = 0.0
    for k in range(n):
        a0 = seg.theta0 + seg.sweep * k / n
        a1 = seg.theta0 + seg.sweep * (k + 1) / n
        p = seg.center + seg.radius * complex(math.cos(a0), math.sin(a0))
        q = seg.center + seg.radius * complex(math.cos(a1), math.sin(a1))
        total += _arg_change_line(p, q, z)
        # correct by the circular segment between arc and chord
        if abs(z - seg.center) < seg.radius:
            mid = 0.5 * (a0 + a1)
            m = seg.center + seg.radius * complex(math.cos(mid), math.sin(mid))
            side_z = _cross(q - p, z - p)
            side_m = _cross(q - p, m - p)
            if side_z * side_m > 0:
                total += math.copysign(TWO_PI, a1 - a0)
    return total


def _arg_change_param(seg: Segment, z: complex, depth: int = 0) -> float:
    s = seg.sample_params()
    w = seg.point(s) - z
    d = np.angle(w[1:] / w[:-1])
    total = 0.0
    bad = np.abs(d) > math.pi / 3
    total += float(np.sum(d[~bad]))
    for idx in np.nonzero(bad)[0]:
        total += _refine_arg(seg, z, s[idx], s[idx + 1], 0)
    return total


def _refine_arg(seg, z, a, b, depth):
    ss = np.linspace(a, b, 33)
    w = seg.point(ss) - z
    d = np.angle(w[1:] / w[:-1])
    if depth > 30:
        return float(np.sum(d))
    tot = 0.0
    for k in range(len(d)):
        if abs(d[k]) > math.pi / 3:
            tot += _refine_arg(seg, z, ss[k], ss[k + 1], depth + 1)
        else:
            tot += float(d[k])
    return tot


def arg_change(path: PiecewisePath, z: complex) -> float:
    total = 0.0
    for seg in path.segments:
        if isinstance(seg, LineSegment):
            total += _arg_change_line(seg.p, seg.q, z)
        elif isinstance(seg, ArcSegment):
            total += _arg_change_arc(seg, z)
        else:
            total += _arg_change_param(seg, z)
    return total


def winding_number(path: PiecewisePath, z: complex) -> int:
    """Integer number of turns of a closed path around ``z``."""
    if not path.closed:
        raise NotClosed("winding number needs a closed path")
    z = complex(z)
    if path.distance(z) <= path.eps:
        raise PointOnCurve("point lies on the curve", point=z)
    total = arg_change(path, z) / TWO_PI
    k = int(round(total))
    if abs(total - k) >= 0.25:
        raise PointOnCurve("winding accumulation ambiguous", point=z, residual=abs(total - k))
    return k


def close_far(path: PiecewisePath) -> PiecewisePath:
    """Close every open component by a far detour (end -> large arc -> start)."""
    if path.closed:
        return path
    c = path.centroid()
    R0 = 3.0 * path.radius(c) + 1.0
    parts = []
    for k, comp in enumerate(path.component_paths()):
        if comp.closed:
            parts.append(comp)
            continue
        R = R0 * (1.0 + 0.1 * k)
        e, s = comp.end, comp.start
        ae = math.atan2((e - c).imag, (e - c).real)
        as_ = math.atan2((s - c).imag, (s - c).real)
        pe = c + R * complex(math.cos(ae), math.sin(ae))
        ps = c + R * complex(math.cos(as_), math.sin(as_))
        extra = [LineSegment(e, pe)]
        if abs(pe - ps) > 1e-12 * R:
            extra.append(ArcSegment.from_points(pe, ps, c, True))
        extra.append(LineSegment(ps, s))
        parts.append(PiecewisePath(list(comp.segments) + extra, True, path.tol))
    return PiecewisePath.union(parts) if len(parts) > 1 else parts[0]


# ---------------------------------------------------------------------------
# domain partition


@dataclass
class Region:
    id: int
    mu: int
    point: complex
    adjacency: list = field(default_factory=list)  # (neighbour id, segment id)
    depth: int = 0
    area: float = math.inf


@dataclass
class DomainPartition:
    """Connected components of the complement of a path.

    ``regions[0]`` is the unbounded domain.  ``closed_artificially`` flags
    partitions of open paths whose winding labels come from a far closure.
    """

    path: PiecewisePath
    regions: list
    closed_artificially: bool
    _faces: list = field(repr=False, default_factory=list)
    _face_region: dict = field(repr=False, default_factory=dict)
    _edges: object = field(repr=False, default=None)
    _edge_faces: object = field(repr=False, default=None)
    _holes: dict = field(repr=False, default_factory=dict)

    @property
    def mus(self) -> list[int]:
        return [r.mu for r in self.regions]

    def region_of(self, z: complex) -> int:
        return _locate(self, complex(z))

    def to_json(self) -> dict:
        return {
            "closed_artificially": self.closed_artificially,
            "regions": [
                {"id": r.id, "mu": r.mu, "point": [r.point.real, r.point.imag], "depth": r.depth,
                 "adjacency": [[a, b] for a, b in r.adjacency]}
                for r in self.regions
            ],
        }


def _polygon_winding(poly: np.ndarray, z: complex) -> int:
    w = poly - z
    if np.any(np.abs(w) == 0):
        return 0
    d = np.angle(np.roll(w, -1) / w)
    return int(round(float(np.sum(d)) / TWO_PI))


def build_partition(path: PiecewisePath, tol: Tolerances | None = None) -> DomainPartition:
    """Regions of the complement of ``path`` with winding labels and adjacency."""
    tol = tol or path.tol
    crossings, _junctions = _classify_self(path, tol)
    eps = max(path.eps, 1e-12)
    # split parameters per piece
    splits: dict[int, list] = {k: [] for k in range(len(path.segments))}
    for ka, s, kb, u, z in _intersections(path, path, True, tol):
        splits[ka].append((s, z))
        splits[kb].append((u, z))
    nodes: list[complex] = []

    def node_id(z: complex, merge: bool) -> int:
        if merge:
            for k, w in enumerate(nodes):
                if abs(w - z) <= 1e3 * eps:
                    return k
        nodes.append(z)
        return len(nodes) - 1

    special: dict = {}

    def special_id(z):
        for key, v in special.items():
            if abs(key - z) <= 1e3 * eps:
                return v
        k = node_id(z, False)
        special[z] = k
        return k

    edges = []  # (u, v, piece)
    for k, seg in enumerate(path.segments):
        s = seg.sample_params()
        zs = seg.point(s)
        sp_par = np.array(sorted(a for a, _ in splits[k])) if splits[k] else np.zeros(0)
        keep = np.ones(len(s), dtype=bool)
        if len(sp_par):
            idx = np.searchsorted(sp_par, s)
            lo = np.abs(s - sp_par[np.clip(idx - 1, 0, len(sp_par) - 1)])
            hi = np.abs(s - sp_par[np.clip(idx, 0, len(sp_par) - 1)])
            keep = np.minimum(lo, hi) >= 1e-12
            keep[0] = keep[-1] = True
        items = [(float(a), complex(b), False) for a, b, kp in zip(s, zs, keep) if kp]
        for (a, z) in splits[k]:
            items.append((a, z, True))
        items.sort(key=lambda it: (it[0], not it[2]))
        ids = []
        for j, (a, z, sp) in enumerate(items):
            if sp or j == 0 or j == len(items) - 1:
                nid = special_id(z)
            else:
                nid = node_id(z, False)
            if ids and ids[-1] == nid:
                continue
            ids.append(nid)
        for u, v in zip(ids[:-1], ids[1:]):
            edges.append((u, v, k))
    N = len(nodes)
    P = np.array(nodes)
    # half-edges
    he_from, he_to, he_piece = [], [], []
    for u, v, k in edges:
        he_from += [u, v]
        he_to += [v, u]
        he_piece += [k, k]
    he_from = np.array(he_from)
    he_to = np.array(he_to)
    H = len(he_from)
    ang = np.angle(P[he_to] - P[he_from])
    out: list[list[int]] = [[] for _ in range(N)]
    for h in np.argsort(ang, kind="stable"):
        out[he_from[h]].append(int(h))
    pos = np.zeros(H, dtype=int)
    for v in range(N):
        for idx, h in enumerate(out[v]):
            pos[h] = idx
    nxt = np.zeros(H, dtype=int)
    for h in range(H):
        twin = h ^ 1
        v = he_to[h]
        lst = out[v]
        nxt[h] = lst[(pos[twin] - 1) % len(lst)]
    face_of = -np.ones(H, dtype=int)
    faces = []
    for h0 in range(H):
        if face_of[h0] >= 0:
            continue
        cyc = []
        h = h0
        while face_of[h] < 0:
            face_of[h] = len(faces)
            cyc.append(h)
            h = nxt[h]
        faces.append(cyc)
    # areas and components
    area = []
    polys = []
    for cyc in faces:
        poly = P[he_from[cyc]]
        polys.append(poly)
        area.append(0.5 * float(np.sum(_cross(poly, np.roll(poly, -1)))))
    parent = list(range(N))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v, _ in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    comp_faces: dict[int, list[int]] = {}
    for f, cyc in enumerate(faces):
        comp_faces.setdefault(find(int(he_from[cyc[0]])), []).append(f)
    outer = {c: min(fs, key=lambda f: area[f]) for c, fs in comp_faces.items()}
    bounded = [f for f in range(len(faces)) if f not in outer.values()]
    # nesting of components
    face_region: dict[int, int] = {}
    region_faces = [None] + bounded
    for r, f in enumerate(bounded, start=1):
        face_region[f] = r
    holes: dict[int, list[int]] = {r: [] for r in range(len(region_faces))}
    for c, fo in outer.items():
        probe = P[he_from[faces[fo][0]]]
        best, best_area = 0, math.inf
        for f in bounded:
            if find(int(he_from[faces[f][0]])) == c:
                continue
            if area[f] < best_area and _polygon_winding(polys[f], probe) != 0:
                best, best_area = face_region[f], area[f]
        face_region[fo] = best
        if best:
            holes[best].append(fo)
    # adjacency
    adj: dict[int, set] = {r: set() for r in range(len(region_faces))}
    for e, (u, v, k) in enumerate(edges):
        ra, rb = face_region[face_of[2 * e]], face_region[face_of[2 * e + 1]]
        if ra != rb:
            adj[ra].add((rb, k))
            adj[rb].add((ra, k))
    # representative points
    E0, E1 = P[he_from[0::2]], P[he_to[0::2]]

    def clearance(z):
        d = E1 - E0
        t = np.clip(((z - E0) * d.conjugate()).real / np.maximum(np.abs(d) ** 2, 1e-300), 0, 1)
        return float(np.min(np.abs(z - (E0 + t * d))))

    def inside_region(r, z):
        f = region_faces[r]
        if _polygon_winding(polys[f], z) == 0:
            return False
        return not any(_polygon_winding(polys[hf], z) != 0 for hf in holes[r])

    regions = []
    far = path.centroid() + 2.0 * path.radius(path.centroid()) + 1.0
    closed_path = path if path.closed else close_far(path)
    for r, f in enumerate(region_faces):
        if f is None:
            rep = complex(far)
        else:
            cyc = faces[f]
            step = max(1, len(cyc) // 200)
            best, best_c = None, -1.0
            for h in cyc[::step]:
                a, b = P[he_from[h]], P[he_to[h]]
                L = abs(b - a)
                if L <= 1e-12 * path.diameter:
                    continue
                nrm = 1j * (b - a) / L
                for frac in (0.5, 0.25, 0.75):
                    m = a + frac * (b - a)
                    for off in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6):
                        zc = m + nrm * off * max(path.diameter, 1e-9)
                        if inside_region(r, zc):
                            c = clearance(zc)
                            if c > best_c:
                                best, best_c = zc, c
                            break
            if best is None:
                best = complex(np.mean(polys[f]))
            rep = best
        try:
            mu = winding_number(closed_path, rep)
        except PointOnCurve:
            mu = 0
        regions.append(Region(r, mu, rep, sorted(adj[r]), 0, math.inf if f is None else area[f]))
    # depth by BFS from the unbounded region
    depth = {0: 0}
    q = deque([0])
    while q:
        r = q.popleft()
        for nb, _ in regions[r].adjacency:
            if nb not in depth:
                depth[nb] = depth[r] + 1
                q.append(nb)
    for reg in regions:
        reg.depth = depth.get(reg.id, -1)
    part = DomainPartition(path, regions, not path.closed, faces, face_region, (P, he_from, he_to),
                           face_of, holes)
    part._polys = polys
    part._region_faces = region_faces
    return part


def _locate(part: DomainPartition, z: complex) -> int:
    best, best_area = 0, math.inf
    for r, f in enumerate(part._region_faces):
        if f is None:
            continue
        if _polygon_winding(part._polys[f], z) == 0:
            continue
        if any(_polygon_winding(part._polys[hf], z) != 0 for hf in part._holes[r]):
            continue
        a = part.regions[r].area
        if a < best_area:
            best, best_area = r, a
    return best


def point_depth(partition: DomainPartition, z: complex, on_curve_tol: float | None = None):
    """Crossing depth of ``z``: ``(depth, on_boundary)``.

    For a point on the curve the depth of the shallowest adjacent region is
    returned together with ``on_boundary=True``.
    """
    z = complex(z)
    path = partition.path
    tol = on_curve_tol if on_curve_tol is not None else max(1e-7 * path.diameter, 10 * path.eps)
    if path.distance(z) > tol:
        return partition.regions[_locate(partition, z)].depth, False
    P, he_from, he_to = partition._edges
    E0, E1 = P[he_from[0::2]], P[he_to[0::2]]
    d = E1 - E0
    t = np.clip(((z - E0) * d.conjugate()).real / np.maximum(np.abs(d) ** 2, 1e-300), 0, 1)
    dist = np.abs(z - (E0 + t * d))
    near = np.nonzero(dist <= max(tol, 1.5 * float(dist.min())))[0]
    regs = set()
    for e in near:
        regs.add(partition._face_region[partition._edge_faces[2 * e]])
        regs.add(partition._face_region[partition._edge_faces[2 * e + 1]])
    return min(partition.regions[r].depth for r in regs), True


# ---------------------------------------------------------------------------
# auxiliary curves


def crossing_sequence(aux: PiecewisePath, gamma: PiecewisePath, forbidden: Iterable[complex] = (),
                      tol: Tolerances | None = None) -> list[Crossing]:
    """Signed crossings of ``aux`` with ``gamma`` ordered along ``aux``.

    ``param_a`` refers to ``aux`` and ``param_b`` to ``gamma``.  The sign is
    +1 when ``aux`` passes from the right side of ``gamma`` to its left side.
    """
    tol = tol or gamma.tol
    eps = max(gamma.eps, aux.eps, 1e-13)
    margin = 10 * eps
    for p in forbidden:
        if aux.distance(p) <= margin:
            raise NotAdmissible("auxiliary curve passes through a marked point", point=complex(p))
    sin_min = math.sin(tol.theta_min)
    out = []
    for ka, s, kb, u, z in _intersections(aux, gamma, False, tol):
        if any(abs(z - complex(p)) <= margin for p in forbidden):
            raise NotAdmissible("crossing at a marked point", point=z)
        gseg = gamma.segments[kb]
        if _is_endpoint(u):
            # vertex of gamma that is not marked: use the outgoing piece
            if u >= 1 - 1e-9:
                nb = gamma.next_piece(kb)
                if nb is None:
                    raise NotAdmissible("crossing at an endpoint of gamma", point=z)
                kb, u, gseg = nb, 0.0, gamma.segments[nb]
            elif gamma.prev_piece(kb) is None:
                raise NotAdmissible("crossing at an endpoint of gamma", point=z)
            # drop the duplicate reported by the neighbouring piece
            if any(abs(c.point - z) <= margin for c in out):
                continue
        ta = _tangent(aux.segments[ka], s)
        tg = _tangent(gseg, u)
        sang = abs((tg.conjugate() * ta).imag)
        if sang < sin_min:
            raise NotAdmissible("tangential crossing with gamma", point=z)
        out.append(Crossing(z, aux.global_param(ka, s), gamma.global_param(kb, u), crossing_sign(tg, ta),
                            ka, kb, s, u, math.asin(min(sang, 1.0))))
    out.sort(key=lambda c: c.param_a)
    return out


def sub_path(path: PiecewisePath, piece: int, s: float, to_end: bool = True) -> PiecewisePath:
    """The part of ``path`` after (or before) the location ``(piece, s)``."""
    seg = path.segments[piece]
    part = _restrict(seg, s, 1.0) if to_end else _restrict(seg, 0.0, s)
    if to_end:
        segs = ([part] if part is not None else []) + list(path.segments[piece + 1:])
    else:
        segs = list(path.segments[:piece]) + ([part] if part is not None else [])
    if not segs:
        z = complex(seg.point(s))
        segs = [LineSegment(z, z)]
    return PiecewisePath(segs, False, path.tol)


def _restrict(seg: Segment, a: float, b: float):
    if b - a <= 1e-15:
        return None
    if isinstance(seg, LineSegment):
        return LineSegment(complex(seg.point(a)), complex(seg.point(b)))
    if isinstance(seg, ArcSegment):
        return ArcSegment(seg.center, seg.radius, seg.theta0 + a * seg.sweep, (b - a) * seg.sweep)
    f, df = seg.f, seg.df
    return ParametricSegment(lambda s: f(a + (b - a) * s), lambda s: (b - a) * df(a + (b - a) * s),
                             seg.label + f"[{a:.3g},{b:.3g}]")


def restrict_segment(seg: Segment, a: float, b: float) -> Segment:
    r = _restrict(seg, a, b)
    if r is None:
        raise ValueError("empty restriction")
    return r
