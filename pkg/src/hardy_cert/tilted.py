"""The tilted Hardy test.

Zero constraints ``P(0,1|A0,B1) = P(1,0|A1,B0) = P(0,0|A1,B1) = 0`` together
with the tilted Hardy probability ``P(0,0|A0,B0) + w P(1,1|A0,B0)``, whose
classical maximum is ``max(0, w)``.  The optimal quantum strategy uses
``|psi> = cos(theta/2)|00> - sin(theta/2)|11>`` with
``sin(theta) = 3 - sqrt(4w + 5)`` and identical X-Z plane observables on both
sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from .behavior import Behavior, BellFunctional
from .errors import ConsistencyError, DegenerateReduction, NonConvergence, OutOfRange
from .quantum import Z, X, behavior_from_observables

W_MIN = -0.25
W_MAX = 1.0

# (a, b, x, y) entries forced to zero
S_HZ = ((0, 1, 0, 1), (1, 0, 1, 0), (0, 0, 1, 1))


@dataclass(frozen=True)
class TiltParameter:
    w: float

    def __post_init__(self):
        w = float(self.w)
        if not (W_MIN < w < W_MAX):
            raise OutOfRange(f"tilt w={w} outside the open interval (-1/4, 1)")
        object.__setattr__(self, "w", w)

    def __float__(self) -> float:
        return self.w


def _w(w) -> float:
    return TiltParameter(float(w)).w


def hardy_functional(w) -> BellFunctional:
    """``P(0,0|A0,B0) + w P(1,1|A0,B0)``."""
    w = float(w)
    return BellFunctional.from_entries((2, 2, 2, 2), {(0, 0, 0, 0): 1.0, (1, 1, 0, 0): w})


def zero_functional() -> BellFunctional:
    """Sum of the three zero-constrained probabilities."""
    return BellFunctional.from_entries((2, 2, 2, 2), {e: 1.0 for e in S_HZ})


def i_hardy_functional(w) -> BellFunctional:
    """Hardy probability minus its classical offset ``max(0, w)`` minus the zero terms."""
    w = float(w)
    return (hardy_functional(w) - zero_functional()).shifted(-max(0.0, w))


def optimal_theta(w) -> float:
    w = _w(w)
    return math.asin(min(1.0, 3.0 - math.sqrt(4 * w + 5)))


def quantum_max(w) -> float:
    w = _w(w)
    r = math.sqrt(4 * w + 5)
    return ((4 * w + 5) * r - (12 * w + 11)) / (2 * (w + 1))


def hardy_value(w, theta: float) -> float:
    """Tilted Hardy probability of the zero-respecting strategy on ``|psi_theta>``."""
    w = float(w)
    s = math.sin(theta)
    return (s * s + 4 * w) * (1 - s) / (2 - s) ** 2


def hardy_value_dtheta(w, theta: float) -> float:
    s, c = math.sin(theta), math.cos(theta)
    # d/ds of (s^2+4w)(1-s)/(2-s)^2
    num = (2 * s * (1 - s) - (s * s + 4 * w)) * (2 - s) + 2 * (s * s + 4 * w) * (1 - s)
    return c * num / (2 - s) ** 3


def observable_coefficients(theta: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """``((c0z, c0x), (c1z, c1x))`` of the optimal observables for ``sin(theta)``."""
    s = math.sin(theta)
    root = math.sqrt(1 + s)
    c1 = (-math.sqrt(1 - s) / root, math.sqrt(2) * math.sqrt(s) / root)
    c0 = (-(2 + s) * math.sqrt(1 - s) / ((2 - s) * root),
          -math.sqrt(2) * s * math.sqrt(s) / ((2 - s) * root))
    return c0, c1


@dataclass(frozen=True)
class TwoQubitStrategy:
    """State angle plus X-Z plane observables ``c_z Z + c_x X`` per party and input."""

    theta: float
    alice: tuple[tuple[float, float], ...]
    bob: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not (0 < self.theta <= math.pi / 2 + 1e-15):
            raise OutOfRange(f"theta={self.theta} outside (0, pi/2]")
        for cz, cx in self.alice + self.bob:
            if abs(cz * cz + cx * cx - 1) >= 1e-12:
                raise ValueError(f"observable ({cz}, {cx}) is not a unit vector")

    def state(self) -> np.ndarray:
        return np.array([math.cos(self.theta / 2), 0, 0, -math.sin(self.theta / 2)])

    def observables(self):
        return ([cz * Z + cx * X for cz, cx in self.alice],
                [cz * Z + cx * X for cz, cx in self.bob])


def canonical_strategy(w) -> TwoQubitStrategy:
    theta = optimal_theta(w)
    coeffs = observable_coefficients(theta)
    return TwoQubitStrategy(theta, coeffs, coeffs)


def behavior_of(strategy: TwoQubitStrategy) -> Behavior:
    a_obs, b_obs = strategy.observables()
    return behavior_from_observables(strategy.state(), a_obs, b_obs)


# --- certified randomness ---------------------------------------------------

def breakpoints() -> tuple[float, float]:
    """Closed-form tilts where the optimal global-randomness setting changes."""
    r177 = math.sqrt(177)
    w0 = 0.25 * (-5 + (3 + 4 * (2 / (3 * (9 + r177))) ** (1 / 3) - (4 + 4 * r177 / 9) ** (1 / 3)) ** 2)
    r69 = math.sqrt(69)
    w1 = 0.25 * (-5 + (3 + (-4 + 10 * (2 / (-11 + 3 * r69)) ** (1 / 3) - (12 * r69 - 44) ** (1 / 3)) / 3) ** 2)
    return w0, w1


def global_randomness_branches(w: float) -> tuple[float, float, float, float]:
    """The four closed-form expressions of the piecewise global min-entropy."""
    r = math.sqrt(4 * w + 5)
    return (
        1 - math.log2((3 - r) ** 3 / (r - 1) ** 2),
        1 - math.log2((8 * r - 16) / (r - 1) ** 2),
        1 - math.log2(3 - r),
        1 - math.log2(2 * r - 4),
    )


def global_randomness_formula(w) -> tuple[float, int]:
    """Piecewise global min-entropy and the (1-based) branch used."""
    w = _w(w)
    w0, w1 = breakpoints()
    if w <= w0:
        k = 1
    elif w <= w1:
        k = 2
    elif w <= 1 / 9:
        k = 3
    else:
        k = 4
    return global_randomness_branches(w)[k - 1], k


def local_randomness_formula(w) -> float:
    theta = optimal_theta(w)
    t = math.tan(theta / 2)
    return 1 - math.log2(1 + math.cos(theta) * (1 - t) / (1 + t))


def branch_crossings(tol: float = 1e-12) -> tuple[float, float]:
    """Tilts where adjacent branches (1,2) and (2,3) coincide, by bracketed root finding."""
    def gap(i, j):
        return lambda w: global_randomness_branches(w)[i] - global_randomness_branches(w)[j]
    r0 = brentq(gap(0, 1), -0.2, -0.13, xtol=tol, rtol=4 * np.finfo(float).eps)
    r1 = brentq(gap(1, 2), -0.13, -0.08, xtol=tol, rtol=4 * np.finfo(float).eps)
    return r0, r1


@dataclass(frozen=True)
class RandomnessReport:
    w: float
    h_local: float
    h_global: float
    argmax_setting: tuple[int, int]
    argmax_outcome: tuple[int, int]
    branch: int
    h_local_behavior: float
    h_global_behavior: float


def randomness(w, tol: float = 1e-9) -> RandomnessReport:
    """Local and global min-entropy of the optimal strategy, from the formulas and the table.

    Raises ConsistencyError if the closed forms disagree with the behavior by more than ``tol``.
    """
    w = _w(w)
    p = behavior_of(canonical_strategy(w))
    h_loc = local_randomness_formula(w)
    h_glob, branch = global_randomness_formula(w)

    t = p.table
    best = None
    for x in range(2):
        for y in range(2):
            h = -math.log2(t[x, y].max())
            if best is None or h > best[0] + 1e-15:
                a, b = np.unravel_index(int(np.argmax(t[x, y])), (2, 2))
                best = (h, (x, y), (int(a), int(b)))
    h_loc_beh = max(-math.log2(m.max()) for m in p.marginal_a())
    if abs(best[0] - h_glob) > tol or abs(h_loc_beh - h_loc) > tol:
        raise ConsistencyError(
            f"w={w}: formula (local {h_loc}, global {h_glob}, branch {branch}) disagrees with "
            f"behavior (local {h_loc_beh}, global {best[0]})")
    return RandomnessReport(w, h_loc, h_glob, best[1], best[2], branch, h_loc_beh, best[0])


def reduce_general_hardy(alpha) -> tuple[float, float, float]:
    """Map ``sum_ij alpha_ij P(i,j|A0,B0)`` to ``offset + scale * P^w_Hardy``.

    ``alpha`` is ordered ``(alpha_00, alpha_01, alpha_10, alpha_11)``.
    Returns ``(scale, offset, w)``.
    """
    a00, a01, a10, a11 = (float(v) for v in alpha)
    offset = (a01 + a10) / 2
    scale = a00 - offset
    if scale == 0:
        raise DegenerateReduction("alpha_00 equals the mean of the off-diagonal coefficients")
    return scale, offset, (a11 - offset) / scale


# --- numeric uniqueness check -------------------------------------------------

def _strategy_behavior_table(theta, phis) -> np.ndarray:
    """Vectorised Born rule for X-Z observables at angles ``phis = (a0, a1, b0, b1)``."""
    c, s = math.cos(theta / 2), -math.sin(theta / 2)
    # projector onto outcome o of cos(phi) Z + sin(phi) X is |v><v| with
    # v = (cos(phi/2), sin(phi/2)) for o=0 and (-sin(phi/2), cos(phi/2)) for o=1
    def vecs(phi):
        h = phi / 2
        return np.array([[math.cos(h), math.sin(h)], [-math.sin(h), math.cos(h)]])
    va = [vecs(phis[0]), vecs(phis[1])]
    vb = [vecs(phis[2]), vecs(phis[3])]
    t = np.empty((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            amp = c * np.outer(va[x][:, 0], vb[y][:, 0]) + s * np.outer(va[x][:, 1], vb[y][:, 1])
            t[x, y] = amp * amp
    return t


@dataclass
class SelfTestReport:
    w: float
    best_value: float
    best_theta: float
    target_value: float
    target_theta: float
    strategy_distance: float
    max_zero_violation: float
    restarts: int
    converged_restarts: int
    passed: bool
    best_coefficients: tuple = field(default=())


def _canonical_distance(coeffs, target) -> float:
    """Max deviation modulo a global sign flip of X components and party swap."""
    (a, b), (ta, tb) = coeffs, target
    best = math.inf
    for sign in (1.0, -1.0):
        for first, second in ((a, b), (b, a)):
            d = 0.0
            for got, want in zip(first + second, ta + tb):
                d = max(d, abs(got[0] - want[0]), abs(sign * got[1] - want[1]))
            best = min(best, d)
    return best


def selftest_uniqueness_check(w, restarts: int = 50, seed: int = 0,
                              penalty: float = 1e6, tol: float = 1e-12) -> SelfTestReport:
    """Multi-start maximization of the tilted Hardy value over two-qubit X-Z strategies.

    The zero constraints enter as a penalty.  Passes when the best value matches
    the analytic maximum to 1e-6 and the maximizer matches the canonical
    strategy to 1e-4 up to the symmetries of the state.
    """
    w = _w(w)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    target = quantum_max(w)
    rng = np.random.default_rng(seed)

    def objective(v):
        theta = math.pi / 2 * (1 + math.sin(v[0])) / 2
        c, s = math.cos(theta / 2), -math.sin(theta / 2)
        ca0, sa0, ca1, sa1 = math.cos(v[1] / 2), math.sin(v[1] / 2), math.cos(v[2] / 2), math.sin(v[2] / 2)
        cb0, sb0, cb1, sb1 = math.cos(v[3] / 2), math.sin(v[3] / 2), math.cos(v[4] / 2), math.sin(v[4] / 2)
        p00 = (c * ca0 * cb0 + s * sa0 * sb0) ** 2
        p11 = (c * sa0 * sb0 + s * ca0 * cb0) ** 2
        z1 = (-c * ca0 * sb1 + s * sa0 * cb1) ** 2   # (0,1|0,1)
        z2 = (-c * sa1 * cb0 + s * ca1 * sb0) ** 2   # (1,0|1,0)
        z3 = (c * ca1 * cb1 + s * sa1 * sb1) ** 2    # (0,0|1,1)
        return -(p00 + w * p11) + penalty * (z1 + z2 + z3)

    best = None
    converged = 0
    for _ in range(restarts):
        v0 = rng.uniform(-math.pi, math.pi, 5)
        r = minimize(objective, v0, method="BFGS", options={"gtol": 1e-10, "maxiter": 2000})
        if abs(-r.fun - target) < 1e-4:
            converged += 1
        if best is None or r.fun < best.fun:
            best = r
    if converged == 0:
        raise NonConvergence(f"no restart reached within 1e-4 of {target}")
    # derivative-free polish of the winner only
    best = minimize(objective, best.x, method="Nelder-Mead",
                    options={"xatol": 1e-11, "fatol": tol, "maxiter": 20000})

    v = best.x
    theta = math.pi / 2 * (1 + math.sin(v[0])) / 2
    t = _strategy_behavior_table(theta, v[1:])
    value = t[0, 0, 0, 0] + w * t[0, 0, 1, 1]
    zero_violation = max(t[0, 1, 0, 1], t[1, 0, 1, 0], t[1, 1, 0, 0])
    coeffs = (tuple((math.cos(p), math.sin(p)) for p in v[1:3]),
              tuple((math.cos(p), math.sin(p)) for p in v[3:5]))
    canon = canonical_strategy(w)
    dist = _canonical_distance(coeffs, (canon.alice, canon.bob))
    passed = abs(value - target) < 1e-6 and dist < 1e-4
    return SelfTestReport(w, float(value), theta, target, canon.theta, dist, float(zero_violation),
                          restarts, converged, passed, coeffs)
