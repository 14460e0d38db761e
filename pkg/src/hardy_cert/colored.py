"""Guessing probability against an adversary who mixes Hardy-respecting boxes.

Given an observed tilted Hardy value ``p`` at fixed ``w``, the zero-respecting
pure strategies form two branches ``theta1(p) < theta2(p)``.  The adversary's
best guess of the ``(A0, B0)`` outcome is either a mixture of the deterministic
point ``(0, 1)`` with the branch-2 strategy at the tangent point ``p_k``, or the
pure branch-1 strategy.  The curve is validated only at the breakpoint ``w0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import OutOfRange, RootNotBracketed
from .tilted import (TiltParameter, breakpoints, hardy_value, hardy_value_dtheta, optimal_theta,
                     quantum_max)

W0 = breakpoints()[0]
FD_STEP = 1e-6
ROOT_TOL = 1e-10


def theta_w0() -> float:
    """Closed-form optimal angle at ``w0``."""
    r = math.sqrt(177)
    s = -4 * (2 / (3 * (9 + r))) ** (1 / 3) + (2 / 3) ** (2 / 3) * (9 + r) ** (1 / 3)
    return math.asin(s)


def _newton(w, theta, p):
    d = hardy_value_dtheta(w, theta)
    if d == 0:
        return theta
    step = theta - (hardy_value(w, theta) - p) / d
    # keep the step only when it helps; near the branch merge d ~ 0
    if 0 < step <= math.pi / 2 and abs(hardy_value(w, step) - p) < abs(hardy_value(w, theta) - p):
        return step
    return theta


def theta_solutions(p: float, w: float) -> tuple[float, float]:
    """The two angles in ``(0, pi/2]`` at which the tilted Hardy value equals ``p``."""
    w = TiltParameter(w).w
    q = quantum_max(w)
    if not (0 < p <= q + 1e-12):
        raise OutOfRange(f"p={p} outside (0, {q}]")
    if p >= q:
        # double root; the trigonometric form loses half the digits here
        t = optimal_theta(w)
        return t, t
    R = 1 + 10 * p + p * p - 12 * w
    arg = (p**3 + 15 * p * p + p * (39 - 18 * w) - 36 * w - 1) / R**1.5
    phi = math.acos(max(-1.0, min(1.0, arg)))
    base = (1 - p) / 3
    amp = 2 / 3 * math.sqrt(R)
    s1 = base + amp * math.sin(math.pi / 6 - phi / 3)
    s2 = base + amp * math.sin(math.pi / 6 + phi / 3)
    t1 = math.asin(min(1.0, s1))
    t2 = math.asin(min(1.0, s2))
    return _newton(w, t1, p), _newton(w, t2, p)


def p01_at(theta: float) -> float:
    """``P(0,1|A0,B0)`` of the zero-respecting strategy on ``|psi_theta>``."""
    s = math.sin(theta)
    return s**3 / (2 * (2 - s) ** 2)


def p11_at(theta: float) -> float:
    """``P(1,1|A0,B0)`` of the zero-respecting strategy on ``|psi_theta>``."""
    s = math.sin(theta)
    return 0.5 + math.cos(theta) * (2 + s) * math.sqrt(1 - s) / (2 * (2 - s) * math.sqrt(1 + s)) - p01_at(theta)


def f_branch(p: float, w: float) -> float:
    return p01_at(theta_solutions(p, w)[1])


def g_branch(p: float, w: float) -> float:
    return p11_at(theta_solutions(p, w)[0])


def _tangent_residual(p, w):
    d = (f_branch(p + FD_STEP, w) - f_branch(p - FD_STEP, w)) / (2 * FD_STEP)
    return d * p + 1 - f_branch(p, w)


def tangent_point(w: float = W0) -> tuple[float, float]:
    """``(p_k, p_0)``: tangency point of the line through ``(0, 1)`` and the crossing with branch 1."""
    w = TiltParameter(w).w
    q = quantum_max(w)
    if q <= 4 * FD_STEP:
        raise RootNotBracketed(f"quantum maximum {q} too small for the difference step")
    grid = np.linspace(2 * FD_STEP, q - 2 * FD_STEP, 200)
    vals = [_tangent_residual(p, w) for p in grid]
    pk = None
    for i in range(len(grid) - 1):
        if vals[i] == 0:
            pk = grid[i]
            break
        if vals[i] * vals[i + 1] < 0:
            pk = brentq(_tangent_residual, grid[i], grid[i + 1], args=(w,), xtol=ROOT_TOL * 1e-3)
            break
    if pk is None:
        raise RootNotBracketed(f"no tangency root on (0, {q}) for w={w}")
    slope = (f_branch(pk, w) - 1) / pk

    def cross(p):
        return slope * p + 1 - g_branch(p, w)

    lo = 1e-9
    if cross(lo) * cross(pk) > 0:
        raise RootNotBracketed(f"tangent line does not cross branch 1 on (0, {pk}]")
    p0 = brentq(cross, lo, pk, xtol=ROOT_TOL * 1e-3)
    return float(pk), float(p0)


@dataclass(frozen=True)
class ColoredNoisePoint:
    p: float
    guess_prob: float
    h_bits: float
    branch: str  # "tangent-mixture" or "pure-upper-branch"


class ColoredModel:
    """Guessing-probability curve at fixed ``w`` with the tangent construction cached."""

    def __init__(self, w: float = W0):
        self.w = TiltParameter(w).w
        self.validated = abs(self.w - W0) < 1e-12
        self.q = quantum_max(self.w)
        self.pk, self.p0 = tangent_point(self.w)
        self.slope = (f_branch(self.pk, self.w) - 1) / self.pk

    def guess(self, p: float) -> ColoredNoisePoint:
        if not (0 <= p <= self.q + 1e-12):
            raise OutOfRange(f"p={p} outside [0, {self.q}]")
        if p <= self.p0:
            g, branch = self.slope * p + 1, "tangent-mixture"
        else:
            g, branch = g_branch(min(p, self.q), self.w), "pure-upper-branch"
        return ColoredNoisePoint(float(p), float(g), float(-math.log2(g)) + 0.0, branch)

    def curve(self, steps: int) -> list[ColoredNoisePoint]:
        if steps < 2:
            raise ValueError("steps must be >= 2")
        return [self.guess(p) for p in np.linspace(0, self.q, steps)]


def guess_colored(p: float, w: float = W0) -> ColoredNoisePoint:
    return ColoredModel(w).guess(p)


@dataclass(frozen=True)
class DominanceReport:
    w: float
    grid: int
    max_violation: float
    worst: tuple[float, float]
    checked: int


def verify_mixture_dominance(w: float = W0, grid: int = 100) -> DominanceReport:
    """Check that mixing a branch-1 strategy at ``q`` with the deterministic ``(1,1)`` box never beats branch 1 at ``p``.

    The deterministic box has tilted Hardy value ``w`` and guess 1, so reaching
    ``p`` needs weight ``r = (p - w)/(q - w)`` on the quantum point (``q >= p``).
    """
    if grid < 10:
        raise ValueError("grid must be >= 10")
    w = TiltParameter(w).w
    q_max = quantum_max(w)
    ps = np.linspace(q_max / grid, q_max, grid)
    g = np.array([g_branch(p, w) for p in ps])
    worst, arg, n = -math.inf, (math.nan, math.nan), 0
    for i, p in enumerate(ps):
        for j in range(i, grid):
            r = (p - w) / (ps[j] - w)
            lhs = r * g[j] + (1 - r)
            v = lhs - g[i]
            n += 1
            if v > worst:
                worst, arg = v, (float(p), float(ps[j]))
    return DominanceReport(w, grid, float(worst), arg, n)
