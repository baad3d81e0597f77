"""Exact polynomials over the rationals and over quadratic fields Q(sqrt d)."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import SchemaError, UnsupportedEndpointField


def _squarefree(d: int) -> tuple[int, int]:
    """``d = k**2 * r`` with ``r`` squarefree; returns ``(k, r)``."""
    if d == 0:
        return 0, 0
    sign = -1 if d < 0 else 1
    n = abs(d)
    k = 1
    f = 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            k *= f
        f += 1
    return k, sign * n


class QSqrt:
    """``a + b*sqrt(d)`` with rational ``a, b`` and squarefree ``d``."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 0):
        a, b = Fraction(a), Fraction(b)
        if d != 0 and b != 0:
            k, r = _squarefree(int(d))
            b *= k
            d = r
            if d == 1:
                a, b, d = a + b, Fraction(0), 0
        else:
            b, d = Fraction(0), 0
        self.a, self.b, self.d = a, b, d

    @staticmethod
    def sqrt(d: int, coef=1) -> "QSqrt":
        return QSqrt(0, coef, d)

    def _lift(self, o):
        if isinstance(o, QSqrt):
            if self.d and o.d and self.d != o.d:
                raise UnsupportedEndpointField("mixed quadratic fields", d1=self.d, d2=o.d)
            return o
        if isinstance(o, (int, Fraction)):
            return QSqrt(o, 0, 0)
        return NotImplemented

    def _field(self, o: "QSqrt") -> int:
        return self.d or o.d

    def __add__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return QSqrt(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QSqrt(-self.a, -self.b, self.d)

    def __sub__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return QSqrt(self.a - o.a, self.b - o.b, self._field(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        d = self._field(o)
        return QSqrt(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conj(self) -> "QSqrt":
        return QSqrt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        num = self * o.conj()
        return QSqrt(num.a / n, num.b / n, num.d)

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __pow__(self, k: int):
        out = QSqrt(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.b == 0 and self.a == o
        if isinstance(o, QSqrt):
            return self.a == o.a and self.b == o.b and (self.b == 0 or self.d == o.d)
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d if self.b else 0))

    def sign(self) -> int:
        """Sign of a real element (``d >= 0``)."""
        if self.b and self.d < 0:
            raise ValueError("non-real element has no sign")
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        return sa if self.a * self.a > self.b * self.b * self.d else -sa

    def __gt__(self, o):
        return (self - o).sign() > 0

    def __lt__(self, o):
        return (self - o).sign() < 0

    def __ge__(self, o):
        return (self - o).sign() >= 0

    def __le__(self, o):
        return (self - o).sign() <= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __complex__(self):
        if self.d >= 0:
            return complex(float(self.a) + float(self.b) * math.sqrt(self.d), 0.0)
        return complex(float(self.a), float(self.b) * math.sqrt(-self.d))

    def __float__(self):
        return complex(self).real

    def __repr__(self):
        if not self.b:
            return f"QSqrt({self.a})"
        return f"QSqrt({self.a} + {self.b}*sqrt({self.d}))"

    def to_json(self):
        return {"a": frac_str(self.a), "b": frac_str(self.b), "d": self.d}

    def mp(self, mpmath):
        return mpmath.mpf(self.a.numerator) / self.a.denominator + (
            mpmath.mpf(self.b.numerator) / self.b.denominator) * mpmath.sqrt(self.d)


Scalar = Union[int, Fraction, QSqrt]


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(v) -> Scalar:
    """Ints, ``"p/q"`` strings, Fractions, or ``{a, b, d}`` quadratic elements."""
    if isinstance(v, (QSqrt, Fraction)):
        return v
    if isinstance(v, bool):
        raise SchemaError("boolean is not a number")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except ValueError as e:
            raise SchemaError(f"not an exact rational: {v!r}") from e
    if isinstance(v, dict):
        return QSqrt(parse_scalar(v.get("a", 0)), parse_scalar(v.get("b", 0)), int(v.get("d", 0)))
    if isinstance(v, float):
        raise UnsupportedEndpointField("floating point value is not exact", value=v)
    raise SchemaError(f"cannot parse exact value {v!r}")


def scalar_json(x: Scalar):
    if isinstance(x, QSqrt):
        return frac_str(x.a) if not x.b else x.to_json()
    return frac_str(Fraction(x))


def is_zero(x) -> bool:
    return not bool(x)


def to_complex(x) -> complex:
    return complex(x)


# ---------------------------------------------------------------------------


class Poly:
    """Exact polynomial with ascending coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = (0,)):
        c = [x if isinstance(x, QSqrt) else Fraction(x) for x in coeffs]
        while len(c) > 1 and is_zero(c[-1]):
            c.pop()
        if not c:
            c = [Fraction(0)]
        self.c = tuple(c)

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def const(cls, a) -> "Poly":
        return cls([a])

    @classmethod
    def parse(cls, coeffs: Sequence) -> "Poly":
        return cls([parse_scalar(v) for v in coeffs])

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.c) - 1

    @property
    def lead(self):
        return self.c[-1]

    def is_zero(self) -> bool:
        return len(self.c) == 1 and is_zero(self.c[0])

    def __eq__(self, o):
        if not isinstance(o, Poly):
            o = Poly([o])
        return len(self.c) == len(o.c) and all(a == b for a, b in zip(self.c, o.c))

    def __hash__(self):
        return hash(self.c)

    def __add__(self, o):
        o = o if isinstance(o, Poly) else Poly([o])
        n = max(len(self.c), len(o.c))
        return Poly([(self.c[i] if i < len(self.c) else 0) + (o.c[i] if i < len(o.c) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-a for a in self.c])

    def __sub__(self, o):
        return self + (-(o if isinstance(o, Poly) else Poly([o])))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, Poly):
            return Poly([a * o for a in self.c])
        out = [Fraction(0)] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if is_zero(a):
                continue
            for j, b in enumerate(o.c):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x):
        acc = self.c[-1]
        for a in reversed(self.c[:-1]):
            acc = acc * x + a
        return acc

    def compose(self, inner: "Poly") -> "Poly":
        """``self(inner(x))``."""
        acc = Poly([self.c[-1]])
        for a in reversed(self.c[:-1]):
            acc = acc * inner + a
        return acc

    def deriv(self) -> "Poly":
        if len(self.c) == 1:
            return Poly([0])
        return Poly([a * k for k, a in enumerate(self.c) if k > 0])

    def antideriv(self) -> "Poly":
        return Poly([0] + [a / (k + 1) for k, a in enumerate(self.c)])

    def divmod(self, o: "Poly") -> tuple["Poly", "Poly"]:
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        q = [Fraction(0)] * max(1, len(r) - len(o.c) + 1)
        lo = o.lead
        while len(r) >= len(o.c) and not (len(r) == 1 and is_zero(r[0])):
            k = len(r) - len(o.c)
            f = r[-1] / lo
            q[k] = f
            for i, b in enumerate(o.c):
                r[k + i] = r[k + i] - f * b
            r.pop()
            while len(r) > 1 and is_zero(r[-1]):
                r.pop()
            if len(r) < len(o.c):
                break
        return Poly(q), Poly(r if r else [0])

    def monic(self) -> "Poly":
        lead = self.lead
        return self * (QSqrt(1) / lead if isinstance(lead, QSqrt) else 1 / Fraction(lead))

    def shift_const(self, a) -> "Poly":
        return self - a

    def to_complex(self) -> list:
        return [complex(a) for a in self.c]

    def to_json(self) -> list:
        return [scalar_json(a) for a in self.c]

    def is_rational(self) -> bool:
        return all(not isinstance(a, QSqrt) or not a.b for a in self.c)

    def __repr__(self) -> str:
        return f"Poly({[str(a) for a in self.c]})"


def chebyshev(n: int) -> Poly:
    """``T_n`` from ``T_{k+1} = 2 x T_k - T_{k-1}``."""
    if n < 0:
        raise SchemaError("n must be non-negative")
    t0, t1 = Poly([1]), Poly([0, 1])
    if n == 0:
        return t0
    x2 = Poly([0, 2])
    for _ in range(n - 1):
        t0, t1 = t1, x2 * t1 - t0
    return t1


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic() if not a.is_zero() else a


def sturm_count(p: Poly, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in the open interval ``(lo, hi)`` (rational ``p``)."""
    if p.degree <= 0:
        return 0
    seq = [p, p.deriv()]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        _, r = seq[-2].divmod(seq[-1])
        seq.append(-r)
    seq = [s for s in seq if not s.is_zero()]

    def changes(x):
        vals = [s(x) for s in seq]
        vals = [v for v in vals if v != 0]
        return sum(1 for u, v in zip(vals, vals[1:]) if (u > 0) != (v > 0))

    cnt = changes(lo) - changes(hi)
    if p(hi) == 0:
        cnt -= 1
    return cnt


# ---------------------------------------------------------------------------
# composition factors


def adic_digits(P: Poly, W: Poly) -> list | None:
    """Constant digits ``c_i`` with ``P = sum c_i W^i``, or None."""
    if W.degree < 1:
        return None
    digits = []
    cur = P
    while not cur.is_zero():
        q, r = cur.divmod(W)
        if r.degree > 0:
            return None
        digits.append(r.c[0])
        cur = q
    return digits or [Fraction(0)]


def right_factor_candidate(P: Poly, d: int) -> Poly | None:
    """The monic ``W`` of degree ``d`` with ``W(0)=0`` whose power matches ``P``'s top coefficients."""
    n = P.degree
    if d < 1 or n % d:
        return None
    m = n // d
    p = P.monic()
    w = [Fraction(0)] * d + [Fraction(1)]
    for k in range(1, d):
        w[d - k] = Fraction(0)
        cur = Poly(w) ** m
        coef = cur.c[n - k] if n - k < len(cur.c) else 0
        w[d - k] = (p.c[n - k] - coef) / m
    return Poly(w)


class Decomposition:
    def __init__(self, outer: Poly, inner: Poly):
        self.outer, self.inner = outer, inner

    def __repr__(self):
        return f"Decomposition(outer={self.outer}, inner={self.inner})"

    def to_json(self):
        return {"outer": self.outer.to_json(), "inner": self.inner.to_json()}


def right_factors(P: Poly, proper: bool = True) -> list[Decomposition]:
    """All ``P = outer(inner)`` with ``inner`` monic, ``inner(0) = 0``."""
    n = P.degree
    out = []
    for d in range(1 if not proper else 2, n + (0 if proper else 1)):
        if n % d:
            continue
        W = right_factor_candidate(P, d)
        if W is None:
            continue
        digits = adic_digits(P, W)
        if digits is not None:
            out.append(Decomposition(Poly(digits), W))
    return out


def factor_through(Q: Poly, W: Poly) -> Poly | None:
    digits = adic_digits(Q, W)
    return Poly(digits) if digits is not None else None


def common_right_factor(P: Poly, Q: Poly) -> Decomposition | None:
    """Maximal-degree common right factor ``W`` (monic, ``W(0)=0``) of degree at least 2."""
    best = None
    for dec in right_factors(P, proper=False):
        if dec.inner.degree < 2:
            continue
        Qt = factor_through(Q, dec.inner)
        if Qt is not None and (best is None or dec.inner.degree > best[1].inner.degree):
            best = (Qt, dec)
    if best is None:
        return None
    Qt, dec = best
    out = Decomposition(dec.outer, dec.inner)
    out.q_outer = Qt
    return out
