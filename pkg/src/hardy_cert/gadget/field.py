"""Exact arithmetic in Q(sqrt 3)."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence

_Q = (int, Fraction)


@total_ordering
class QSqrt3:
    """``a + b*sqrt(3)`` with rational ``a``, ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _lift(v) -> "QSqrt3":
        if isinstance(v, QSqrt3):
            return v
        if isinstance(v, _Q):
            return QSqrt3(v)
        raise TypeError(f"cannot mix QSqrt3 with {type(v).__name__}")

    def __add__(self, o):
        o = self._lift(o)
        return QSqrt3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt3(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return QSqrt3(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self) -> "QSqrt3":
        return QSqrt3(self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 3 b^2``; zero only for zero."""
        return self.a * self.a - 3 * self.b * self.b

    def __truediv__(self, o):
        o = self._lift(o)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 3)")
        num = self * o.conj()
        return QSqrt3(num.a / n, num.b / n)

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __eq__(self, o):
        try:
            o = self._lift(o)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def sign(self) -> int:
        """Exact sign of the real number ``a + b sqrt 3``."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with 3 b^2
        d = a * a - 3 * b * b
        if d == 0:
            return 0
        return (1 if a > 0 else -1) if d > 0 else (1 if b > 0 else -1)

    def __lt__(self, o):
        return (self - self._lift(o)).sign() < 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(3)

    def key(self) -> tuple[Fraction, Fraction]:
        return (self.a, self.b)

    def __str__(self) -> str:
        return f"{self.a}+{self.b}√3"

    def __repr__(self) -> str:
        return f"QSqrt3({self.a}, {self.b})"

    @classmethod
    def parse(cls, text: str) -> "QSqrt3":
        m = re.fullmatch(r"\s*([-+]?[\d/]+)\s*\+\s*([-+]?[\d/]+)√3\s*", text)
        if not m:
            raise ValueError(f"not an element of Q(sqrt 3): {text!r}")
        return cls(Fraction(m.group(1)), Fraction(m.group(2)))


S3 = QSqrt3(0, 1)
ZERO = QSqrt3()
ONE = QSqrt3(1)

Vec = tuple[QSqrt3, ...]


def vec(*entries) -> Vec:
    return tuple(QSqrt3._lift(e) for e in entries)


def dot(u: Sequence[QSqrt3], v: Sequence[QSqrt3]) -> QSqrt3:
    s = ZERO
    for x, y in zip(u, v):
        s = s + x * y
    return s


def scale(k, v: Sequence[QSqrt3]) -> Vec:
    return tuple(k * x for x in v)


def sub(u: Sequence[QSqrt3], v: Sequence[QSqrt3]) -> Vec:
    return tuple(x - y for x, y in zip(u, v))


def is_zero(v: Iterable[QSqrt3]) -> bool:
    return not any(v)


def parallel(u: Sequence[QSqrt3], v: Sequence[QSqrt3]) -> bool:
    """Exact test for linear dependence of two vectors (all 2x2 minors vanish)."""
    n = len(u)
    return all(not (u[i] * v[j] - u[j] * v[i]) for i in range(n) for j in range(i + 1, n))


def rank(vectors: Sequence[Sequence[QSqrt3]]) -> int:
    """Rank by exact Gaussian elimination."""
    rows = [list(v) for v in vectors]
    if not rows:
        return 0
    ncol = len(rows[0])
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def null_space(vectors: Sequence[Sequence[QSqrt3]], dim: int) -> list[Vec]:
    """Basis of the orthogonal complement of ``vectors`` in ``Q(sqrt 3)^dim`` (reduced echelon)."""
    rows = [list(v) for v in vectors]
    pivots = []
    r = 0
    for c in range(dim):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * dim
        v[f] = ONE
        for i, c in enumerate(pivots):
            v[c] = -rows[i][f]
        basis.append(tuple(v))
    return basis


def gram_schmidt(vectors: Sequence[Sequence[QSqrt3]]) -> list[Vec]:
    """Pairwise-orthogonal vectors spanning the same space, without normalization."""
    out: list[Vec] = []
    for v in vectors:
        w = tuple(v)
        for u in out:
            w = sub(w, scale(dot(w, u) / dot(u, u), u))
        if not is_zero(w):
            out.append(w)
    return out


def primitive(v: Sequence[QSqrt3]) -> Vec:
    """Rescale by a rational so all coordinates are in Z[sqrt 3] with no common
    integer factor and the first nonzero entry is positive.

    Keeps compiled vectors reproducible; directions and orthogonality are unchanged.
    """
    from math import lcm

    dens = [x.a.denominator for x in v] + [x.b.denominator for x in v]
    m = 1
    for d in dens:
        m = lcm(m, d)
    w = tuple(x * m for x in v)
    g = 0
    for x in w:
        g = math.gcd(g, int(x.a), int(x.b))
    if g > 1:
        w = tuple(QSqrt3(x.a / g, x.b / g) for x in w)
    first = next((x for x in w if x), None)
    if first is not None and first.sign() < 0:
        w = tuple(-x for x in w)
    return w
