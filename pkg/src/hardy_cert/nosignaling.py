"""Measurement-dependent locality and no-signalling adversaries.

The seed used to pick inputs is only partially random: every input pair has
probability in ``[l, h]``.  The MDL expression reweights the tilted Hardy test
accordingly; its local value is at most 0.  Against an adversary restricted
only by no-signalling, an observed violation caps every outcome probability,
both in closed form and by linear programming over the 2-input 2-output
no-signalling polytope.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .behavior import Behavior, BellFunctional, enumerate_deterministic
from .errors import Infeasible, NotNormalized, OutOfRange, SolverError
from .tilted import S_HZ, TiltParameter, i_hardy_functional

LP_TOL = 1e-9


@dataclass(frozen=True)
class SeedBounds:
    l: float
    h: float
    epsilon: Optional[float] = None

    def __post_init__(self):
        if not (0 < self.l <= self.h < 1):
            raise OutOfRange(f"need 0 < l <= h < 1, got l={self.l}, h={self.h}")
        if self.epsilon is not None:
            e = self.epsilon
            if self.l != (0.5 - e) ** 2 or self.h != (0.5 + e) ** 2:
                raise ValueError("l, h do not match the stated source bias")


def sv_to_lh(epsilon: float) -> SeedBounds:
    """Input-pair probability bounds for two bits from a source of bias ``epsilon``."""
    if not (0 <= epsilon < 0.5):
        raise OutOfRange(f"bias {epsilon} outside [0, 1/2)")
    return SeedBounds((0.5 - epsilon) ** 2, (0.5 + epsilon) ** 2, epsilon)


# --- MDL expression -----------------------------------------------------------

def joint_distribution(p: Behavior, inputs) -> np.ndarray:
    """``P(a,b,x,y) = P_XY(x,y) P(a,b|x,y)`` indexed ``[x, y, a, b]``."""
    q = np.asarray(inputs, dtype=float).reshape(2, 2)
    return q[:, :, None, None] * p.table


def mdl_value(p_joint, w: float, bounds: SeedBounds, tol: float = 1e-12) -> float:
    """Tilted MDL expression on a joint distribution indexed ``[x, y, a, b]``."""
    j = np.asarray(p_joint, dtype=float)
    if j.shape != (2, 2, 2, 2):
        raise ValueError(f"joint distribution must have shape (2,2,2,2), got {j.shape}")
    if abs(j.sum() - 1) > tol:
        raise NotNormalized(f"joint distribution sums to {j.sum()}")
    w = float(w)
    pxy00 = j[0, 0].sum()
    hardy = j[0, 0, 0, 0] + w * j[0, 0, 1, 1] - max(0.0, w) * pxy00
    zeros = sum(j[x, y, a, b] for a, b, x, y in S_HZ)
    return float(bounds.l * hardy - bounds.h * zeros)


def input_distribution_vertices(bounds: SeedBounds) -> list[np.ndarray]:
    """Vertices of ``{q in [l, h]^4 : sum q = 1}``; at most one coordinate is strictly inside."""
    l, h = bounds.l, bounds.h
    out: list[tuple] = []
    for free in range(4):
        for others in itertools.product((l, h), repeat=3):
            rest = 1 - sum(others)
            if l - 1e-15 <= rest <= h + 1e-15:
                q = list(others)
                q.insert(free, min(h, max(l, rest)))
                t = tuple(round(v, 15) for v in q)
                if t not in out:
                    out.append(t)
    return [np.array(v) for v in out]


def mdl_local_max(w: float, bounds: SeedBounds) -> float:
    """Largest MDL value over deterministic boxes and extreme input distributions.

    The expression is bilinear in (box, input distribution), so vertices suffice.
    """
    best = -math.inf
    verts = input_distribution_vertices(bounds)
    for d in enumerate_deterministic((2, 2, 2, 2)):
        beh = d.behavior()
        for q in verts:
            best = max(best, mdl_value(joint_distribution(beh, q), w, bounds, tol=1e-9))
    return best


def tilde_mdl_functional(w: float, bounds: SeedBounds) -> BellFunctional:
    """Worst-case weighting of the conditional box: ``l^2`` on the Hardy term, ``h^2`` on the zeros."""
    w = float(w)
    l2, h2 = bounds.l**2, bounds.h**2
    terms = {(0, 0, 0, 0): l2, (1, 1, 0, 0): l2 * w}
    for e in S_HZ:
        terms[e] = terms.get(e, 0.0) - h2
    return BellFunctional.from_entries((2, 2, 2, 2), terms, offset=-l2 * max(0.0, w))


def tilde_mdl_threshold(tilde_max: float, w: float, bounds: SeedBounds) -> float:
    """``I_w`` level implied by the worst-case MDL value."""
    w = float(w)
    return 4 * (tilde_max / (bounds.l * bounds.h) + max(0.0, w)) - (w - 2)


# --- closed-form no-signalling bounds -----------------------------------------

def ns_analytic_bound(w: float, delta: float, bounds: SeedBounds) -> float:
    """Cap on any ``P(a,b|x,y)`` given an observed MDL value ``delta``, clamped to [0, 1]."""
    w = TiltParameter(w).w
    if delta < 0:
        raise OutOfRange(f"observed value {delta} must be >= 0")
    lh = bounds.l * bounds.h
    if w <= 0:
        v = 1 - delta / (lh * (1 + w))
    else:
        v = 1 - (delta - lh * w) / (lh * (1 - w))
    return float(min(1.0, max(0.0, v)))


def hardy_level_from_mdl(w: float, delta: float, bounds: SeedBounds) -> float:
    """Smallest ``I^Hardy_w`` compatible with an observed MDL value ``delta``.

    ``ns_analytic_bound(w, delta, bounds) == hardy_level_bound(w, result)`` (before clamping).
    """
    w = TiltParameter(w).w
    return delta / (bounds.l * bounds.h) - max(0.0, w)


def hardy_level_bound(w: float, value: float) -> float:
    """Cap on any ``P(a,b|x,y)`` given ``I^Hardy_w = value``."""
    w = TiltParameter(w).w
    return 1 - value / (1 + w) if w <= 0 else 1 - value / (1 - w)


def hardy_level_bound_anti(w: float, value: float) -> float:
    """Sharper cap for entries with ``a xor b != x y``."""
    w = TiltParameter(w).w
    return 1 - 2 * value / (1 + w) if w <= 0 else 1 - 2 * value / (1 - w)


def hardy_level_lower(w: float, value: float) -> float:
    """Floor on entries with ``a xor b == x y`` (stated for ``w <= 0``)."""
    w = TiltParameter(w).w
    return value / (1 + w) if w <= 0 else value / (1 - w)


# --- LP over the no-signalling polytope ----------------------------------------

def _ns_constraints() -> tuple[np.ndarray, np.ndarray]:
    """Normalization and no-signalling rows on the flattened ``[x, y, a, b]`` table."""
    idx = lambda x, y, a, b: ((x * 2 + y) * 2 + a) * 2 + b
    rows, rhs = [], []
    for x, y in itertools.product(range(2), repeat=2):
        r = np.zeros(16)
        for a, b in itertools.product(range(2), repeat=2):
            r[idx(x, y, a, b)] = 1
        rows.append(r)
        rhs.append(1.0)
    for x, a in itertools.product(range(2), repeat=2):
        r = np.zeros(16)
        for b in range(2):
            r[idx(x, 0, a, b)] += 1
            r[idx(x, 1, a, b)] -= 1
        rows.append(r)
        rhs.append(0.0)
    for y, b in itertools.product(range(2), repeat=2):
        r = np.zeros(16)
        for a in range(2):
            r[idx(0, y, a, b)] += 1
            r[idx(1, y, a, b)] -= 1
        rows.append(r)
        rhs.append(0.0)
    return np.array(rows), np.array(rhs)


def _functional_row(f: BellFunctional) -> tuple[np.ndarray, float]:
    j = f.as_joint()
    return j.joint.reshape(-1), j.offset


@dataclass
class NsLpProblem:
    """Linear program over no-signalling boxes with one Bell-value equality."""

    functional: BellFunctional
    value: Optional[float]
    at_least: bool = False  # bound the Bell value from below instead of fixing it

    def _solve(self, c: np.ndarray) -> np.ndarray:
        A, b = _ns_constraints()
        A_ub = b_ub = None
        if self.value is not None:
            row, off = _functional_row(self.functional)
            if self.at_least:
                A_ub, b_ub = -row[None, :], np.array([off - self.value])
            else:
                A = np.vstack([A, row])
                b = np.append(b, self.value - off)
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A, b_eq=b, bounds=[(0, None)] * 16, method="highs",
                      options={"primal_feasibility_tolerance": LP_TOL,
                               "dual_feasibility_tolerance": LP_TOL})
        if res.status == 2:
            raise Infeasible(f"no no-signalling box reaches value {self.value}")
        if res.status != 0:
            raise SolverError(res.message)
        return res.x

    def maximize_entry(self, target) -> float:
        a, b, x, y = target
        c = np.zeros(16)
        c[((x * 2 + y) * 2 + a) * 2 + b] = -1
        return float(-c @ self._solve(c))

    def minimize_entry(self, target) -> float:
        a, b, x, y = target
        c = np.zeros(16)
        c[((x * 2 + y) * 2 + a) * 2 + b] = 1
        return float(c @ self._solve(c))

    def functional_range(self) -> tuple[float, float]:
        row, off = _functional_row(self.functional)
        free = NsLpProblem(self.functional, None)
        lo = float(row @ free._solve(row) + off)
        hi = float(row @ free._solve(-row) + off)
        return lo, hi


def ns_hardy_range(w: float) -> tuple[float, float]:
    return NsLpProblem(i_hardy_functional(w), None).functional_range()


def ns_lp_max_prob(w: float, hardy_level_value: float, target) -> float:
    """Largest ``P(a,b|x,y)`` over no-signalling boxes with ``I^Hardy_w`` equal to the given value."""
    w = TiltParameter(w).w
    return NsLpProblem(i_hardy_functional(w), hardy_level_value).maximize_entry(target)


def ns_lp_mdl_max_prob(w: float, delta: float, bounds: SeedBounds, target) -> float:
    """Largest ``P(a,b|x,y)`` over no-signalling boxes whose Hardy level is implied by ``delta``."""
    v = hardy_level_from_mdl(w, delta, bounds)
    return NsLpProblem(i_hardy_functional(w), v, at_least=True).maximize_entry(target)


def ns_lp_min_prob(w: float, hardy_level_value: float, target) -> float:
    w = TiltParameter(w).w
    return NsLpProblem(i_hardy_functional(w), hardy_level_value).minimize_entry(target)


def pr_boxes() -> list[Behavior]:
    """The eight extremal nonlocal boxes ``a xor b = xy xor ax xor by xor g``."""
    out = []
    for al, be, ga in itertools.product(range(2), repeat=3):
        t = np.zeros((2, 2, 2, 2))
        for x, y, a in itertools.product(range(2), repeat=3):
            b = (x * y + al * x + be * y + ga + a) % 2
            t[x, y, a, b] = 0.5
        out.append(Behavior(t))
    return out


def ns_vertices() -> list[Behavior]:
    return [d.behavior() for d in enumerate_deterministic((2, 2, 2, 2))] + pr_boxes()


@dataclass(frozen=True)
class LpGridReport:
    points: int
    violations: int
    max_excess: float
    max_gap: float
    lower_violations: int
    lower_max_excess: float


def validate_lp_grid(w_grid, n_values: int = 20) -> LpGridReport:
    """Compare LP maxima with the closed-form caps on a (w, value, target) grid."""
    points = violations = lower_viol = 0
    max_excess = lower_excess = -math.inf
    max_gap = 0.0
    targets = [(a, b, x, y) for x in range(2) for y in range(2) for a in range(2) for b in range(2)]
    for w in w_grid:
        _, hi = ns_hardy_range(w)
        for v in np.linspace(0, hi, n_values):
            cap = hardy_level_bound(w, v)
            floor = hardy_level_lower(w, v)
            for t in targets:
                lp = ns_lp_max_prob(w, v, t)
                points += 1
                excess = lp - cap
                max_excess = max(max_excess, excess)
                max_gap = max(max_gap, cap - lp)
                if excess > LP_TOL:
                    violations += 1
                a, b, x, y = t
                if w <= 0 and (a ^ b) == x * y:
                    lo = ns_lp_min_prob(w, v, t)
                    lower_excess = max(lower_excess, floor - lo)
                    if floor - lo > LP_TOL:
                        lower_viol += 1
    return LpGridReport(points, violations, float(max_excess), float(max_gap), lower_viol,
                        float(lower_excess))
