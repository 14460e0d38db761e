"""Ladder Hardy test with ``N + 1`` binary measurements per party.

Zero constraints: ``P(0,1|A_k,B_{k-1}) = P(1,0|A_{k-1},B_k) = 0`` for
``k = 1..N`` and ``P(0,0|A_0,B_0) = 0``.  The Hardy probability is
``P(0,0|A_N,B_N)``.  The quantum family uses ``alpha|00> - beta|11>`` with
``t = alpha/beta`` and real projective measurements in the Z-X plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .behavior import Behavior
from .errors import OutOfRange


@dataclass(frozen=True)
class LadderParams:
    N: int
    t: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise OutOfRange(f"N must be a positive integer, got {self.N}")
        if not (0 < self.t < 1):
            raise OutOfRange(f"t must lie in (0, 1), got {self.t}")


def ladder_zeros(N: int) -> list[tuple[int, int, int, int]]:
    """The ``2N + 1`` constrained entries as ``(a, b, x, y)``."""
    z = [(0, 1, k, k - 1) for k in range(1, N + 1)]
    z += [(1, 0, k - 1, k) for k in range(1, N + 1)]
    z.append((0, 0, 0, 0))
    return z


def ladder_table(N: int, t: float) -> np.ndarray:
    """Closed-form distribution ``[x, y, a, b]`` of the ladder strategy."""
    x = np.arange(N + 1)[:, None].astype(float)
    y = np.arange(N + 1)[None, :].astype(float)
    s = (-1.0) ** (x + y)
    den = (1 + t ** (2 * x + 1)) * (1 + t ** (2 * y + 1))
    pre = t * t / (1 + t * t)
    p00 = pre * (1 - s * t ** (x + y)) ** 2 / den
    p01 = pre * (1 + (-1.0) ** (y - x) * t ** (x - y - 1)) ** 2 * t ** (2 * y + 1) / den
    p10 = pre * (1 + (-1.0) ** (x - y) * t ** (y - x - 1)) ** 2 * t ** (2 * x + 1) / den
    p11 = (1 / (1 + t * t)) * (1 - s * t ** (x + y + 2)) ** 2 / den
    out = np.empty((N + 1, N + 1, 2, 2))
    out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = p00, p01, p10, p11
    return out


def ladder_behavior(params: LadderParams) -> Behavior:
    return Behavior(ladder_table(params.N, params.t))


def printed_hardy_expression(N: int, t: float) -> float:
    """The commonly quoted one-line form ``t^2/(1+t^2) (1 - t^{2N})/(1 + t^{2N+1})``."""
    return t * t / (1 + t * t) * (1 - t ** (2 * N)) / (1 + t ** (2 * N + 1))


@dataclass(frozen=True)
class LadderHardy:
    value: float          # from the full distribution
    printed: float        # one-line expression
    agree: bool


def ladder_hardy_prob(params: LadderParams, tol: float = 1e-12) -> LadderHardy:
    N, t = params.N, params.t
    v = float(ladder_table(N, t)[N, N, 0, 0])
    pr = printed_hardy_expression(N, t)
    return LadderHardy(v, pr, abs(v - pr) <= tol)


def _hardy(N: int, t: float) -> float:
    x = float(N)
    den = (1 + t ** (2 * x + 1)) ** 2
    return t * t / (1 + t * t) * (1 - t ** (2 * x)) ** 2 / den


def ladder_optimal_t(N: int, grid: int = 2001, tol: float = 1e-10) -> tuple[float, float]:
    """Maximize ``P(0,0|A_N,B_N)`` over ``t``: grid bracket then golden section."""
    if N < 1:
        raise OutOfRange("N must be >= 1")
    ts = np.linspace(0, 1, grid)[1:-1]
    vals = np.array([_hardy(N, t) for t in ts])
    i = int(np.argmax(vals))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
    if lo < ts[i] < hi:
        r = minimize_scalar(lambda t: -_hardy(N, t), bracket=(lo, ts[i], hi), method="golden",
                            tol=tol)
    else:
        r = minimize_scalar(lambda t: -_hardy(N, t), bounds=(lo, hi), method="bounded",
                            options={"xatol": tol})
    t_star = float(r.x)
    return t_star, _hardy(N, t_star)


def ladder_global_randomness(N: int, t: float) -> float:
    """Min-entropy of the outcome pair at setting ``(A_N, B_0)``."""
    p = ladder_table(N, t)[N, 0]
    return float(-math.log2(p.max()))


# --- independent Born-rule construction ------------------------------------------

def ladder_angles(N: int, t: float) -> np.ndarray:
    """Measurement angles solving the zero constraints in order.

    ``P(0,0|A_0,B_0) = 0`` with ``a_0 = b_0`` fixes ``tan^2 a_0 = t``; each
    ``P(0,1|A_k,B_{k-1}) = 0`` then gives ``tan a_k = -t tan b_{k-1}``.  The
    ladder is symmetric, so ``b_k = a_k``.
    """
    alpha = t / math.sqrt(1 + t * t)
    beta = 1 / math.sqrt(1 + t * t)
    a = np.empty(N + 1)
    a[0] = math.atan(math.sqrt(alpha / beta))
    for k in range(1, N + 1):
        # alpha cos(a_k)(-sin b) - beta sin(a_k) cos b = 0
        a[k] = math.atan2(-alpha * math.sin(a[k - 1]), beta * math.cos(a[k - 1]))
    return a


def ladder_born_behavior(N: int, t: float) -> Behavior:
    alpha = t / math.sqrt(1 + t * t)
    beta = 1 / math.sqrt(1 + t * t)
    psi = np.array([alpha, 0, 0, -beta])
    ang = ladder_angles(N, t)
    vecs = [np.array([[math.cos(v), math.sin(v)], [-math.sin(v), math.cos(v)]]) for v in ang]
    table = np.empty((N + 1, N + 1, 2, 2))
    for x in range(N + 1):
        for y in range(N + 1):
            for a in range(2):
                for b in range(2):
                    amp = np.kron(vecs[x][a], vecs[y][b]) @ psi
                    table[x, y, a, b] = amp * amp
    return Behavior(table)
