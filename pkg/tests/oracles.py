"""Independent reference computations, frozen for the test suite.

Nothing here imports branchcut: each oracle is an elementary formula or a
brute-force computation with mpmath or plain numpy.
"""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np


def winding_dense(pts: np.ndarray, z: complex) -> int:
    """Winding number of a densely sampled closed polyline around ``z``."""
    w = np.asarray(pts, complex) - z
    d = np.angle(np.roll(w, -1) / w)
    return int(round(float(d.sum()) / (2 * math.pi)))


def simple_residues(num, den) -> list[tuple[complex, complex]]:
    """Poles and residues of ``num/den`` (ascending coefficients) with simple poles."""
    mpmath.mp.dps = 40
    den_desc = [mpmath.mpc(c) for c in reversed(list(den))]
    roots = mpmath.polyroots(den_desc, maxsteps=200, extraprec=200)
    dden = [c * (len(den_desc) - 1 - i) for i, c in enumerate(den_desc[:-1])]
    num_desc = [mpmath.mpc(c) for c in reversed(list(num))]
    out = []
    for r in roots:
        res = mpmath.polyval(num_desc, r) / mpmath.polyval(dden, r)
        out.append((complex(r), complex(res)))
    return out


def rational_cauchy(num, den, pts: np.ndarray, t: complex) -> complex:
    """``(1/2 pi i) int g/(z - t)`` over a closed curve, for rational g with simple poles and deg num < deg den + 1.

    Residue theorem applied to ``g(z)/(z - t)``: the pole at ``t`` contributes
    ``mu(t) g(t)`` and each pole ``p`` of ``g`` contributes ``mu(p) res_p/(p - t)``.
    """
    g = np.polyval(list(reversed(num)), t) / np.polyval(list(reversed(den)), t)
    out = winding_dense(pts, t) * g
    for p, r in simple_residues(num, den):
        out += winding_dense(pts, p) * r / (p - t)
    return complex(out)


def sqrt_interval_integral(t: float) -> float:
    """``int_0^1 sqrt(x)/(x - t) dx`` for ``t < 0``: ``2 - 2 sqrt(-t) atan(1/sqrt(-t))``."""
    s = math.sqrt(-t)
    return 2 - 2 * s * math.atan(1 / s)


def poly_moment_exact(P: list, Q: list, a: Fraction, b: Fraction, k: int) -> Fraction:
    """``int_a^b P^k Q P' dx`` with rational coefficients, by brute-force expansion."""

    def mul(u, v):
        out = [Fraction(0)] * (len(u) + len(v) - 1)
        for i, x in enumerate(u):
            for j, y in enumerate(v):
                out[i + j] += x * y
        return out

    P = [Fraction(c) for c in P]
    dP = [i * c for i, c in enumerate(P)][1:] or [Fraction(0)]
    f = [Fraction(1)]
    for _ in range(k):
        f = mul(f, P)
    f = mul(mul(f, [Fraction(c) for c in Q]), dP)
    return sum(c * (b ** (i + 1) - a ** (i + 1)) / (i + 1) for i, c in enumerate(f))


def chebyshev_T(n: int) -> list[int]:
    """Ascending integer coefficients of ``T_n`` from ``cos(n theta)`` via the binomial expansion."""
    out = [0] * (n + 1)
    for j in range(n // 2 + 1):
        # T_n(x) = sum_j C(n, 2j) x^(n-2j) (x^2 - 1)^j
        c = math.comb(n, 2 * j)
        for i in range(j + 1):
            out[n - 2 * j + 2 * i] += c * math.comb(j, i) * (-1) ** (j - i)
    return out


def _ev(c, z):
    return np.polyval(list(reversed(c)), z)


def _der(c):
    return [i * c[i] for i in range(1, len(c))] or [0]


def circle_double_moment(P_num, P_den, Q_num, Q_den, i: int, j: int, R: float = 1.0) -> complex:
    """``int_{|x|=R} P^i Q^j P' dx`` by the trapezoidal rule, exact to rounding for Laurent polynomials."""
    n = 4096
    x = R * np.exp(2j * np.pi * np.arange(n) / n)
    pn, pd = _ev(P_num, x), _ev(P_den, x)
    dP = (_ev(_der(P_num), x) * pd - pn * _ev(_der(P_den), x)) / pd ** 2
    f = (pn / pd) ** i * (_ev(Q_num, x) / _ev(Q_den, x)) ** j * dP * 1j * x
    return complex(f.mean() * 2 * np.pi)
