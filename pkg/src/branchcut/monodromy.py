"""Sums of branches along auxiliary curves and the monodromy they generate.

A sum of branches is stored as an integer vector over the *slots* at its base
point: the sorted sheets of every distinct function carried by the curve.
Continuation along a loop permutes slots, so each generator loop acts on
vectors by ``x -> perm(x) + v`` where ``v`` is the loop's own branch sum.
"""
from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebraic import (
    AlgebraicFunctionDef,
    BranchGerm,
    angular_order,
    compose,
    invert,
    jet_at,
    loop_around,
    polyval,
    track_path,
    track_segment,
)
from .cauchy import TWO_PI_I, IntegrandAssignment, _distinct, eval_cauchy
from .config import DEFAULT, Tolerances
from .errors import NotAdmissible, SchemaError
from .paths import (
    ArcSegment,
    LineSegment,
    PiecewisePath,
    _distance_to_segment,
    build_partition,
    crossing_sequence,
    sub_path,
)


# ---------------------------------------------------------------------------
# slots


class SlotBasis:
    """Canonical sheets of every distinct function at one point."""

    def __init__(self, funcs: Sequence[AlgebraicFunctionDef], base: complex, order: int):
        self.base = complex(base)
        self.funcs = list(funcs)
        self.order = order
        self.sheets = [f.sorted_sheets(self.base) for f in self.funcs]
        self.offsets = np.cumsum([0] + [len(s) for s in self.sheets]).tolist()
        self.size = self.offsets[-1]
        self._jets = None

    @property
    def jets(self) -> np.ndarray:
        if self._jets is None:
            rows = []
            for f, ys in zip(self.funcs, self.sheets):
                for y in ys:
                    rows.append(jet_at(f, self.base, y, self.order))
            self._jets = np.array(rows, complex)
        return self._jets

    def func_index(self, f: AlgebraicFunctionDef) -> int:
        for i, h in enumerate(self.funcs):
            if h is f or h.same_as(f):
                return i
        raise KeyError(f)

    def slot(self, fi: int, y: complex) -> int:
        return self.offsets[fi] + int(np.argmin(np.abs(self.sheets[fi] - y)))

    def germ(self, i: int) -> BranchGerm:
        fi = max(k for k in range(len(self.funcs)) if self.offsets[k] <= i)
        y = self.sheets[fi][i - self.offsets[fi]]
        return BranchGerm(self.base, self.jets[i], self.funcs[fi], complex(y))

    def value_jet(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, float) @ self.jets

    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.jets[:, 0])))) if self.size else 1.0


@dataclass
class FormalBranchSum:
    """Signed sum of germs at ``base``; ``vector`` counts each slot."""

    base: complex
    terms: list
    vector: np.ndarray
    basis: SlotBasis = field(repr=False)

    @property
    def evaluated_jet(self) -> np.ndarray:
        return self.basis.value_jet(self.vector)

    def evaluate(self, t) -> np.ndarray:
        return polyval(self.evaluated_jet, np.asarray(t) - self.base)

    def continued_value(self, t: complex, tol: Tolerances = DEFAULT) -> complex:
        """Value at ``t`` by continuing each germ along the segment from ``base``; no jet truncation."""
        total = 0j
        for i in np.flatnonzero(self.vector):
            g = self.basis.germ(int(i))
            state = track_segment(g.source, LineSegment(self.base, complex(t)), g.sheet, 0.0, 1.0, tol)[0]
            total += int(self.vector[i]) * complex(g.source.value(state))
        return total

    def is_zero(self, eps: float) -> bool:
        return bool(np.all(np.abs(self.evaluated_jet) <= eps * self.basis.scale()))

    def to_json(self) -> dict:
        return {"base": [self.base.real, self.base.imag],
                "terms": [[int(s), g.to_json()] for s, g in self.terms],
                "evaluated_jet": [[float(c.real), float(c.imag)] for c in self.evaluated_jet]}


def sum_of_branches(S: PiecewisePath, a: IntegrandAssignment, forbidden: Sequence[complex] | None = None,
                    basis: SlotBasis | None = None) -> FormalBranchSum:
    """Signed germs at the crossings of ``S`` with the curve, continued to the end of ``S``."""
    tol = a.tol
    if forbidden is None:
        forbidden = list(a.sigma) + list(a.sigma1)
    xs = crossing_sequence(S, a.gamma, forbidden, tol)
    end = S.end
    if basis is None or abs(basis.base - end) > 1e-12:
        basis = SlotBasis(a.distinct_functions(), end, tol.jet_order)
    vec = np.zeros(basis.size, int)
    terms = []
    for c in xs:
        p = a.pieces[c.piece_b]
        y = complex(p.sheet_s(c.s_b)[0])
        rest = sub_path(S, c.piece_a, c.s_a, True)
        y_end = track_path(p.f, rest, y, tol) if rest is not None else y
        fi = basis.func_index(p.f)
        i = basis.slot(fi, y_end)
        vec[i] += c.sign
        terms.append((c.sign, basis.germ(i)))
    return FormalBranchSum(end, terms, vec, basis)


# ---------------------------------------------------------------------------
# generators and words


@dataclass(frozen=True)
class LoopWord:
    """Word in the generator loops: ``((index, +-1), ...)``, freely reduced."""

    letters: tuple = ()

    @classmethod
    def of(cls, letters) -> "LoopWord":
        out: list = []
        for g, e in letters:
            if out and out[-1][0] == g and out[-1][1] == -e:
                out.pop()
            else:
                out.append((int(g), int(e)))
        return cls(tuple(out))

    def __mul__(self, other: "LoopWord") -> "LoopWord":
        return LoopWord.of(self.letters + other.letters)

    def inverse(self) -> "LoopWord":
        return LoopWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def power(self, n: int) -> "LoopWord":
        return LoopWord.of(self.letters * n)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(f"s{g}" + ("" if e > 0 else "^-1") for g, e in self.letters) or "1"


class MonodromyContext:
    """Generator loops at ``c`` with their slot permutations and branch sums."""

    def __init__(self, a: IntegrandAssignment, c: complex, punctures: Sequence[complex] | None = None,
                 radii: Sequence[float] | None = None):
        self.a = a
        self.tol = a.tol
        self.c = complex(c)
        if a.gamma.distance(self.c) <= 1e-9 * (1 + abs(self.c)):
            raise NotAdmissible("base point lies on the curve")
        pts = list(a.sigma) + list(a.sigma1) if punctures is None else [complex(p) for p in punctures]
        order = angular_order(self.c, pts)
        self.punctures = [pts[i] for i in order]
        self.radii = list(radii) if radii is not None else self._radii()
        self._check_tails()
        self.basis = SlotBasis(a.distinct_functions(), self.c, self.tol.jet_order)
        self.forbidden = list(a.sigma) + list(a.sigma1)
        self.loops = [loop_around(self.c, p, r, self.tol) for p, r in zip(self.punctures, self.radii)]
        self.perms = [self.transport(L) for L in self.loops]
        self.shifts = [sum_of_branches(L, a, self.forbidden, self.basis).vector for L in self.loops]

    def _radii(self) -> list[float]:
        out = []
        pts = self.punctures
        for i, p in enumerate(pts):
            d = [abs(p - q) for j, q in enumerate(pts) if j != i]
            dg = self.a.gamma.distance(p)
            if dg > 1e-9 * (1 + abs(p)):
                d.append(dg)
            d.append(abs(p - self.c))
            out.append(0.25 * min(d))
        return out

    def _check_tails(self) -> None:
        for i, (p, r) in enumerate(zip(self.punctures, self.radii)):
            q = p + r * (self.c - p) / abs(self.c - p)
            seg = LineSegment(self.c, q)
            for j, (p2, r2) in enumerate(zip(self.punctures, self.radii)):
                if j != i and _distance_to_segment(seg, p2) <= 1.05 * r2:
                    raise NotAdmissible("a generator tail passes near another marked point; move the base point",
                                        tail=i, point=p2)

    def transport(self, L: PiecewisePath) -> list[int]:
        perm = []
        for f, ys in zip(self.basis.funcs, self.basis.sheets):
            fi = self.basis.func_index(f)
            for y in ys:
                y1 = track_path(f, L, y, self.tol)
                perm.append(self.basis.slot(fi, y1))
        return perm

    @property
    def n_generators(self) -> int:
        return len(self.loops)

    # affine action ------------------------------------------------------------
    def letter(self, g: int, e: int):
        P, v = self.perms[g], self.shifts[g]
        if e > 0:
            return P, v
        Pi = invert(P)
        return Pi, -apply_perm(Pi, v)

    def act(self, word: LoopWord, x: np.ndarray | None = None):
        """``(perm, vector)`` of ``x`` continued along ``word`` plus the word's own sum."""
        n = self.basis.size
        perm = list(range(n))
        vec = np.zeros(n, int) if x is None else np.array(x, int)
        for g, e in word.letters:
            P, v = self.letter(g, e)
            vec = apply_perm(P, vec) + v
            perm = compose(perm, P)
        return perm, vec

    def realize(self, word: LoopWord) -> PiecewisePath:
        segs = []
        for g, e in word.letters:
            L = self.loops[g] if e > 0 else self.loops[g].reversed()
            segs.extend(L.segments)
        if not segs:
            raise SchemaError("empty word has no realization")
        return PiecewisePath(segs, True, self.tol)

    def key(self, vec: np.ndarray) -> tuple:
        jet = self.basis.value_jet(vec)
        r = self.radius_scale()
        sc = self.basis.scale()
        jet = jet * r ** np.arange(len(jet)) / sc
        q = np.round(np.concatenate([jet.real, jet.imag]) * 1e6).astype(np.int64)
        return tuple(q.tolist())

    def radius_scale(self) -> float:
        return 0.5 * min([abs(p - self.c) for p in self.punctures] + [1.0])

    def is_zero(self, vec: np.ndarray) -> bool:
        jet = self.basis.value_jet(vec) * self.radius_scale() ** np.arange(self.basis.order + 1)
        return bool(np.all(np.abs(jet) <= self.tol.eps_jet * self.basis.scale()))


def apply_perm(P: Sequence[int], x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    out[np.asarray(P)] = x
    return out


def word_action(word: LoopWord, x: FormalBranchSum | None, ctx: MonodromyContext) -> FormalBranchSum:
    """Continue ``x`` along the word's loop and add the loop's own branch sum."""
    vec0 = None if x is None else x.vector
    _, vec = ctx.act(word, vec0)
    terms = [(int(np.sign(k)), ctx.basis.germ(i)) for i, k in enumerate(vec) for _ in range(abs(int(k)))]
    return FormalBranchSum(ctx.c, terms, vec, ctx.basis)


@dataclass
class MonodromyVerdict:
    classification: str  # trivial | finite | infinite | inconclusive
    order: int | None
    witness: LoopWord | None
    orbit: list
    word_length: int
    eps_jet: float
    growth_residuals: list = field(default_factory=list)
    states_explored: int = 0

    @property
    def orbit_size(self) -> int:
        return len(self.orbit)

    def to_json(self) -> dict:
        return {
            "classification": self.classification,
            "order": self.order,
            "witness_word": str(self.witness) if self.witness is not None else None,
            "orbit_size": self.orbit_size,
            "growth_residuals": self.growth_residuals,
            "parameters": {"word_length": self.word_length, "eps_jet": self.eps_jet},
        }


def classify_monodromy(a: IntegrandAssignment, c: complex | None = None, L: int | None = None,
                       ctx: MonodromyContext | None = None, state_cap: int = 60000) -> MonodromyVerdict:
    """Orbit of the zero sum under all loop words of length at most ``L``."""
    if ctx is None:
        ctx = MonodromyContext(a, c if c is not None else default_basepoint(a))
    tol = a.tol
    L = tol.word_length if L is None else L
    n = ctx.basis.size
    ident = tuple(range(n))
    zero = np.zeros(n, int)
    letters = [(g, e) for g in range(ctx.n_generators) for e in (1, -1)]
    acts = [ctx.letter(g, e) for g, e in letters]
    values = {ctx.key(zero): zero}
    if all(ctx.is_zero(v) for v in ctx.shifts):
        return MonodromyVerdict("trivial", 1, None, [zero], L, tol.eps_jet, states_explored=1)
    seen = {(ident, ctx.key(zero))}
    frontier = [(ident, zero, LoopWord())]
    closed = False
    for depth in range(1, L + 1):
        nxt = []
        for perm, vec, word in frontier:
            for (g, e), (P, v) in zip(letters, acts):
                w2 = LoopWord.of(word.letters + ((g, e),))
                if len(w2) < depth:
                    continue
                vec2 = apply_perm(P, vec) + v
                perm2 = tuple(compose(perm, P))
                k = ctx.key(vec2)
                if (perm2, k) in seen:
                    continue
                seen.add((perm2, k))
                values.setdefault(k, vec2)
                if perm2 == ident and not ctx.is_zero(vec2):
                    ok, res = verify_growth(ctx, w2)
                    if ok:
                        return MonodromyVerdict("infinite", None, w2, list(values.values()), L, tol.eps_jet, res,
                                                len(seen))
                nxt.append((perm2, vec2, w2))
                if len(seen) > state_cap:
                    return MonodromyVerdict("inconclusive", None, None, list(values.values()), L, tol.eps_jet,
                                            states_explored=len(seen))
        if not nxt:
            closed = True
            break
        frontier = nxt
    if closed:
        vals = list(values.values())
        return MonodromyVerdict("finite", len(vals), None, vals, L, tol.eps_jet, states_explored=len(seen))
    return MonodromyVerdict("inconclusive", None, None, list(values.values()), L, tol.eps_jet,
                            states_explored=len(seen))


def verify_growth(ctx: MonodromyContext, word: LoopWord, powers=(2, 3, 4)) -> tuple[bool, list]:
    """Check ``g(nV) = n g(V)`` on the realized concatenated paths."""
    a = ctx.a
    base = sum_of_branches(ctx.realize(word), a, ctx.forbidden, ctx.basis).evaluated_jet
    r = ctx.radius_scale() ** np.arange(len(base))
    res = []
    for n in powers:
        val = sum_of_branches(ctx.realize(word.power(n)), a, ctx.forbidden, ctx.basis).evaluated_jet
        res.append(float(np.max(np.abs((val - n * base) * r))))
    nonzero = float(np.max(np.abs(base * r))) > a.tol.eps_jet * ctx.basis.scale()
    return nonzero and max(res) < max(a.tol.eps_jet, 1e-7) * ctx.basis.scale(), res


def default_basepoint(a: IntegrandAssignment) -> complex:
    """A point of the unbounded region well away from the curve, at a generic angle."""
    c0 = a.gamma.centroid()
    R = a.gamma.radius(c0)
    return c0 + 1.7 * R * cmath.exp(-0.61j)


# ---------------------------------------------------------------------------
# local conditions


@dataclass
class LocalCondition:
    point: complex
    kind: str  # endpoint | jump | crossing | singular
    holds: bool
    residual: float
    F: list
    loop_sum: list

    def to_json(self) -> dict:
        return {"point": [self.point.real, self.point.imag], "kind": self.kind, "holds": self.holds,
                "residual": self.residual}


def _point_kind(a: IntegrandAssignment, z: complex) -> str:
    tol = max(a.gamma.eps * 10, 1e-10)
    if any(abs(z - e) <= tol for e in a.gamma.endpoints()):
        return "endpoint"
    if any(abs(z - j) <= tol for j, _ in a.jump_points()):
        return "jump"
    if a.gamma.distance(z) <= tol:
        return "crossing"
    return "singular"


def local_condition_report(a: IntegrandAssignment, c: complex | None = None,
                           ctx: MonodromyContext | None = None) -> list[LocalCondition]:
    """``g(sigma) = F - sigma*(F)`` at every marked and singular point.

    ``F`` is the branch sum along the generator tail ending at ``d`` and
    ``sigma`` the small circle around the point, based at ``d``.
    """
    if ctx is None:
        ctx = MonodromyContext(a, c if c is not None else default_basepoint(a))
    tol = a.tol
    out = []
    for L, p in zip(ctx.loops, ctx.punctures):
        tail = PiecewisePath([L.segments[0]], False, tol)
        circle = PiecewisePath([L.segments[1]], True, tol)
        d = tail.end
        basis = SlotBasis(a.distinct_functions(), d, tol.jet_order)
        F = sum_of_branches(tail, a, ctx.forbidden, basis).vector
        G = sum_of_branches(circle, a, ctx.forbidden, basis).vector
        perm = []
        for f, ys in zip(basis.funcs, basis.sheets):
            fi = basis.func_index(f)
            for y in ys:
                perm.append(basis.slot(fi, track_path(f, circle, y, tol)))
        diff = basis.value_jet(G - (F - apply_perm(perm, F)))
        r = L.segments[1].radius
        res = float(np.max(np.abs(diff * r ** np.arange(len(diff)))))
        out.append(LocalCondition(p, _point_kind(a, p), res <= tol.eps_jet * basis.scale(), res,
                                  F.tolist(), G.tolist()))
    return out


# ---------------------------------------------------------------------------
# vanishing on the unbounded region


@dataclass
class VanishingVerdict:
    vanishes_on_D0: bool
    monodromy: MonodromyVerdict
    shortcut: bool
    witnesses: list

    def to_json(self) -> dict:
        return {"vanishes_on_D0": self.vanishes_on_D0, "shortcut": self.shortcut,
                "monodromy": self.monodromy.to_json(), "witnesses": self.witnesses}


def pole_points(a: IntegrandAssignment) -> list[complex]:
    """Zeros of the leading coefficient (where some sheet escapes to infinity)."""
    from .algebraic import poly_roots

    pts = []
    for f in a.distinct_functions():
        if f.kind == "explicit":
            pts += list(poly_roots(f.A[:, -1]))
    return [complex(p) for p in pts]


def laurent_negative(ctx: MonodromyContext, tail: PiecewisePath, center: complex, r: float, a, M: int = 64) -> float:
    """Largest negative Laurent coefficient of the branch sum ``F`` around ``center``."""
    tol = a.tol
    d = tail.end
    basis = SlotBasis(a.distinct_functions(), d, 0)
    F = sum_of_branches(tail, a, ctx.forbidden, basis).vector
    th0 = cmath.phase(d - center)
    vals = np.zeros(M, complex)
    # continue every slot that appears in F around the circle
    state = []
    for fi, (f, ys) in enumerate(zip(basis.funcs, basis.sheets)):
        for j, y in enumerate(ys):
            k = F[basis.offsets[fi] + j]
            if k:
                state.append((f, complex(y), int(k)))
    for m in range(M):
        vals[m] = sum(k * complex(f.value(y)) for f, y, k in state)
        arc = ArcSegment(center, r, th0 + 2 * math.pi * m / M, 2 * math.pi / M)
        state = [(f, track_segment(f, arc, y, 0.0, 1.0, tol)[0], k) for f, y, k in state]
    coef = np.fft.fft(vals) / M
    # coefficient of (z - center)^-j sits at index M - j after the phase shift
    neg = [abs(coef[M - j]) * r ** j for j in range(1, M // 2)]
    return float(max(neg)) if neg else 0.0


def vanishing_test(a: IntegrandAssignment, c: complex | None = None, ctx: MonodromyContext | None = None,
                   verdict: MonodromyVerdict | None = None) -> VanishingVerdict:
    """Does ``I`` vanish identically on the unbounded region?"""
    if ctx is None:
        ctx = MonodromyContext(a, c if c is not None else default_basepoint(a))
    verdict = verdict or classify_monodromy(a, ctx=ctx)
    if verdict.classification != "trivial":
        return VanishingVerdict(False, verdict, False, [{"reason": "monodromy is not trivial"}])
    part = build_partition(a.gamma, a.tol)
    d0 = part.region_of(ctx.c)
    poles = pole_points(a)
    regions = {complex(p): part.region_of(p) for p in poles}
    if all(r == d0 for r in regions.values()):
        return VanishingVerdict(True, verdict, True, [])
    witnesses = []
    ok = True
    for L, p in zip(ctx.loops, ctx.punctures):
        if not any(abs(p - q) <= 1e-9 * (1 + abs(q)) for q in poles):
            continue
        if part.region_of(p) == d0:
            continue
        tail = PiecewisePath([L.segments[0]], False, a.tol)
        r = L.segments[1].radius
        neg = laurent_negative(ctx, tail, p, r, a)
        good = neg <= a.tol.eps_laurent
        ok = ok and good
        witnesses.append({"pole": [p.real, p.imag], "region": part.region_of(p), "negative_coefficient": neg,
                          "regular": good})
    return VanishingVerdict(ok, verdict, False, witnesses)


# ---------------------------------------------------------------------------
# continuation of the integral across the curve


@dataclass
class ContinuationReport:
    samples: list
    continued: list
    predicted: list
    max_deviation: float

    def to_json(self) -> dict:
        return {"samples": [[t.real, t.imag] for t in self.samples],
                "continued": [[v.real, v.imag] for v in self.continued],
                "predicted": [[v.real, v.imag] for v in self.predicted],
                "max_deviation": self.max_deviation}


def continue_integral(a: IntegrandAssignment, S: PiecewisePath, t_samples: Sequence[complex] | None = None,
                      finger_radius: float | None = None) -> ContinuationReport:
    """Continue ``I`` from the start region of ``S`` to its end by deforming the curve.

    Each crossing pushes a finger of the curve ahead of ``t``; its closed part
    is a small circle around the end of ``S`` carrying the germ continued from
    the crossing.  The result is compared with ``I_j - g(S)``.
    """
    tol = a.tol
    forbidden = list(a.sigma) + list(a.sigma1)
    xs = crossing_sequence(S, a.gamma, forbidden, tol)
    end = S.end
    dist = min([a.gamma.distance(end)] + [abs(end - q) for q in forbidden])
    r = finger_radius or 0.5 * dist
    if t_samples is None:
        t_samples = [end + 0.3 * r * cmath.exp(2j * math.pi * k / 5) for k in range(5)]
    t_samples = [complex(t) for t in t_samples]
    fingers = []
    for c in xs:
        p = a.pieces[c.piece_b]
        y = complex(p.sheet_s(c.s_b)[0])
        rest = sub_path(S, c.piece_a, c.s_a, True)
        y_end = track_path(p.f, rest, y, tol) if rest is not None else y
        T = complex(a.gamma.segments[c.piece_b].deriv(c.s_b))
        A = complex(S.segments[c.piece_a].deriv(c.s_a))
        # the finger turns from the trailing side of the curve to the leading side around the far side of t
        ccw = (T.conjugate() * A).imag < 0
        fingers.append((p.f, y_end, ccw))
    M = 64
    circle_vals = []
    for f, y, ccw in fingers:
        vals = np.zeros(M, complex)
        state = track_segment(f, LineSegment(end, end + r), y, 0.0, 1.0, tol)[0]
        for m in range(M):
            vals[m] = complex(f.value(state))
            arc = ArcSegment(end, r, 2 * math.pi * m / M, 2 * math.pi / M)
            state = track_segment(f, arc, state, 0.0, 1.0, tol)[0]
        circle_vals.append((vals, ccw))
    continued, predicted = [], []
    fbs = sum_of_branches(S, a, forbidden)
    for t in t_samples:
        Ij = eval_cauchy(a, t, tol)
        extra = 0j
        for vals, ccw in circle_vals:
            z = end + r * np.exp(1j * 2 * math.pi * np.arange(M) / M)
            dz = 1j * (z - end) * 2 * math.pi / M
            integral = np.sum(vals * dz / (z - t)) / TWO_PI_I
            extra += integral if ccw else -integral
        continued.append(Ij + extra)
        predicted.append(Ij - fbs.continued_value(t, tol))
    dev = max(abs(u - v) for u, v in zip(continued, predicted)) if t_samples else 0.0
    return ContinuationReport(t_samples, continued, predicted, float(dev))
