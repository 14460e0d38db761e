"""The correlator Bell functional ``I_w`` and its quantum maximum.

``I_w = (1+w)<A0B0> + <A0B1> + <A1B0> - <A1B1> - w(<A0> + <B0>)``

On no-signalling boxes ``I_w = 4 I^Hardy_w + 4 max(0, w) - (w - 2)``.  The
quantum value is the largest eigenvalue of the two-qubit Bell operator with
``A_x = cos(alpha_x) X + sin(alpha_x) Y`` (same for Bob), ``alpha_0 = beta_0 = 0``.
It is obtained two ways: from the stationarity (KKT) candidates for
``cos(alpha_1)`` and by direct maximization over ``(alpha_1, beta_1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .behavior import Behavior, BellFunctional, classical_bound
from .errors import SingularW
from .quantum import I2, X, Y, Z, behavior_from_observables
from .tilted import TiltParameter

SINGULAR_W = 1e-4


def iw_functional(w) -> BellFunctional:
    w = float(w)
    joint = np.zeros((2, 2, 2, 2))
    corr = {(0, 0): 1 + w, (0, 1): 1.0, (1, 0): 1.0, (1, 1): -1.0}
    for (x, y), c in corr.items():
        for a in range(2):
            for b in range(2):
                joint[x, y, a, b] = c * (-1) ** (a + b)
    marg_a = np.array([[-w, w], [0.0, 0.0]])
    marg_b = np.array([[-w, w], [0.0, 0.0]])
    return BellFunctional(joint, marg_a, marg_b, 0.0)


def iw_classical(w) -> float:
    """Closed-form local bound: ``2 - w`` for ``w <= 0`` and ``3w + 2`` above."""
    w = TiltParameter(w).w
    return 2 - w if w <= 0 else 3 * w + 2


def iw_classical_enumerated(w) -> float:
    return classical_bound(iw_functional(w))[0]


def _xy_obs(angle):
    return np.cos(angle) * X + np.sin(angle) * Y


def iw_operator(w, alpha1, beta1) -> np.ndarray:
    w = float(w)
    A0, B0 = X, X
    A1, B1 = _xy_obs(alpha1), _xy_obs(beta1)
    k = np.kron
    return ((1 + w) * k(A0, B0) + k(A0, B1) + k(A1, B0) - k(A1, B1)
            - w * (k(A0, I2) + k(I2, B0)))


def _top_eigs(w, alphas, betas) -> np.ndarray:
    """Largest eigenvalue of the Bell operator for arrays of angles (broadcast)."""
    alphas, betas = np.broadcast_arrays(np.asarray(alphas, float), np.asarray(betas, float))
    ea = np.exp(1j * alphas.ravel())
    eb = np.exp(1j * betas.ravel())
    n = ea.size
    # single-qubit operators [[0, e^{-i a}], [e^{i a}, 0]] stacked
    A1 = np.zeros((n, 2, 2), complex)
    A1[:, 0, 1], A1[:, 1, 0] = ea.conj(), ea
    B1 = np.zeros((n, 2, 2), complex)
    B1[:, 0, 1], B1[:, 1, 0] = eb.conj(), eb
    kron = lambda P, Q: np.einsum("nij,nkl->nikjl", P, Q).reshape(-1, 4, 4)
    Xs = np.broadcast_to(X, (n, 2, 2))
    H = ((1 + w) * np.kron(X, X)[None] + kron(Xs, B1) + kron(A1, Xs) - kron(A1, B1)
         - w * (np.kron(X, I2) + np.kron(I2, X))[None])
    return np.linalg.eigvalsh(H)[:, -1].reshape(alphas.shape)


def top_eigenvalue(w, alpha1, beta1) -> float:
    return float(np.linalg.eigvalsh(iw_operator(w, alpha1, beta1))[-1])


def _neg_top_and_grad(v, w):
    a, b = v
    vals, vecs = np.linalg.eigh(iw_operator(w, a, b))
    psi = vecs[:, -1]
    dA = -math.sin(a) * X + math.cos(a) * Y
    dB = -math.sin(b) * X + math.cos(b) * Y
    B1, A1 = _xy_obs(b), _xy_obs(a)
    ga = np.real(np.vdot(psi, (np.kron(dA, X) - np.kron(dA, B1)) @ psi))
    gb = np.real(np.vdot(psi, (np.kron(X, dB) - np.kron(A1, dB)) @ psi))
    return -vals[-1], -np.array([ga, gb])


def eigen_equation(lam, w, alpha1, beta1) -> float:
    """Characteristic quartic of the Bell operator, written out in the angles."""
    l, a, b = lam, alpha1, beta1
    q = (l + w - 2) * (l + w + 2)
    return (l**4 - 2 * (4 + w * (2 + 3 * w)) * l**2 - 8 * w**2 * (1 + w) * l
            - 4 * w * q * math.cos(a) - 8 * w * q * math.cos(b) * math.sin(a / 2) ** 2
            + w * (12 + w * (8 - w * (4 + 3 * w))) + 12 + 4 * (1 + w) * math.cos(2 * a)
            + 8 * math.cos(2 * b) * math.sin(a) ** 2 + 8 * w * math.cos(2 * b) * math.sin(a) ** 2)


def eigen_equation_diagonal(lam, w, alpha1) -> float:
    """The quartic restricted to ``alpha1 = beta1``."""
    l, a = lam, alpha1
    return (l**4 - 2 * (4 + w + 3 * w * w) * l**2 - 4 * w * w * (1 + 2 * w) * l
            - 8 * w * (l + w + 2) * (l + w - 2) * math.cos(a)
            + 2 * (w * (l + w) ** 2 + 4) * math.cos(2 * a)
            + w * (2 - w * (w + 2) * (3 * w - 4)) - 2 * (w + 1) * math.cos(4 * a) + 10)


def kkt_cos_candidates(w) -> list[float]:
    """The five stationary values of ``cos(alpha1)``, in the conventional order."""
    w = float(w)
    A = 2 * math.sqrt(21 * w**4 + 6 * w**3 - 3 * w**2 + 12 * w + 4)
    # T = cos(3B).  For small |w| T is within ~w^4 of 1 and acos(T) loses half the
    # digits, so 3B is taken from (A^3 cos 3B, A^3 sin 3B) with the sine factored:
    # A^6 (1 - T^2) = 432 w^4 (w+2)^4 (7w+2)(7w^3+2w^2+4).
    cos3 = (4 - 9 * w * w) * A * A + 12 * w * (5 * w**3 + 22 * w * w + 28 * w + 8)
    sin3 = math.sqrt(432 * (7 * w + 2) * (7 * w**3 + 2 * w * w + 4)) * w * w * (w + 2) ** 2
    B = math.atan2(sin3, cos3) / 3
    d = 3 * (2 + w) ** 2
    return [
        -1.0,
        -w / (2 + w),
        ((9 * w * w - 4) - 2 * A * math.cos(B)) / d,
        ((9 * w * w - 4) + 2 * A * math.sin(math.pi / 6 + B)) / d,
        ((9 * w * w - 4) + 2 * A * math.sin(math.pi / 6 - B)) / d,
    ]


def kkt_lambda(w, cos_a) -> float:
    rad = 4 + 8 * (w + 1) / w * (1 + cos_a) * cos_a
    return -w + math.sqrt(rad) if rad >= 0 else math.nan


@dataclass(frozen=True)
class KktCandidate:
    index: int
    cos_alpha1: float
    lam: float
    top_eigenvalue: float
    feasible: bool   # |cos| <= 1 and real square root
    consistent: bool  # lam is the top eigenvalue at alpha1 = beta1 = arccos(cos)


@dataclass(frozen=True)
class KktSolution:
    w: float
    lambda_max: float
    alpha1: float
    case: str
    candidate_index: int
    candidates: tuple[KktCandidate, ...]
    stated_rule_index: int
    stated_rule_agrees: bool


def iw_quantum_kkt(w, tol: float = 1e-8) -> KktSolution:
    """Quantum maximum of ``I_w`` from the stationary-point candidates.

    Each candidate's value is checked against the actual top eigenvalue of the
    Bell operator at ``alpha1 = beta1 = arccos(cos)``; only consistent
    candidates compete.  The conventional rule (candidate 4 for ``w > 0``,
    candidate 5 for ``w < 0``) is reported alongside for comparison.
    """
    w = TiltParameter(w).w
    if abs(w) <= SINGULAR_W:
        raise SingularW(f"|w|={abs(w)} <= {SINGULAR_W}; use iw_quantum_numeric")
    cands = []
    for i, c in enumerate(kkt_cos_candidates(w), start=1):
        feasible = abs(c) <= 1 + 1e-12
        lam = kkt_lambda(w, c) if feasible else math.nan
        feasible = feasible and not math.isnan(lam)
        if feasible:
            a = math.acos(max(-1.0, min(1.0, c)))
            top = top_eigenvalue(w, a, a)
            consistent = abs(lam - top) <= tol * (1 + abs(lam))
        else:
            top, consistent = math.nan, False
        cands.append(KktCandidate(i, c, lam, top, feasible, consistent))
    valid = [c for c in cands if c.consistent]
    # cos = -1 is always consistent (it is the alpha1 = beta1 = pi corner)
    best = max(valid, key=lambda c: c.lam)
    rule = 4 if w > 0 else 5
    rule_c = cands[rule - 1]
    agrees = rule_c.consistent and abs(rule_c.lam - best.lam) <= tol * (1 + abs(best.lam))
    case = "case1" if best.index == 1 else "case4"
    return KktSolution(w, best.lam, math.acos(max(-1.0, min(1.0, best.cos_alpha1))), case,
                       best.index, tuple(cands), rule, agrees)


@dataclass(frozen=True)
class NumericMax:
    lambda_max: float
    alpha1: float
    beta1: float
    grid_best: float


def _fold(angle: float) -> float:
    """Representative in ``[0, pi]``; the spectrum is even in each angle."""
    a = math.remainder(angle, 2 * math.pi)
    return abs(a)


def iw_quantum_numeric(w, grid: int = 181) -> NumericMax:
    """Top eigenvalue maximized over ``(alpha1, beta1)`` by dense grid plus Nelder-Mead.

    Angles are returned folded into ``[0, pi]``.
    """
    w = TiltParameter(w).w
    g = np.linspace(-math.pi, math.pi, grid)
    best_val, best_ab = -math.inf, (0.0, 0.0)
    # row blocks keep memory bounded
    for start in range(0, grid, 64):
        aa, bb = np.meshgrid(g[start:start + 64], g, indexing="ij")
        vals = _top_eigs(w, aa, bb)
        k = int(np.argmax(vals))
        if vals.flat[k] > best_val:
            best_val, best_ab = float(vals.flat[k]), (float(aa.flat[k]), float(bb.flat[k]))
    r = minimize(lambda v: -top_eigenvalue(w, v[0], v[1]), np.array(best_ab), method="Nelder-Mead",
                 options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 4000})
    # Hellmann-Feynman gradient finishes the job where the surface is flat
    r = minimize(_neg_top_and_grad, r.x, args=(w,), jac=True, method="BFGS",
                 options={"gtol": 1e-13, "maxiter": 500})
    x = _newton_polish(r.x, w)
    lam = top_eigenvalue(w, x[0], x[1])
    if lam < best_val:
        lam, x = best_val, np.array(best_ab)
    return NumericMax(lam, _fold(x[0]), _fold(x[1]), best_val)


def _newton_polish(x, w, steps: int = 4, h: float = 1e-5):
    """Newton steps on the analytic gradient; near w = 1 the surface is almost flat
    across the diagonal and value-based stopping rules leave ~1e-5 in the angles."""
    x = np.array(x, float)
    for _ in range(steps):
        g = -_neg_top_and_grad(x, w)[1]
        H = np.empty((2, 2))
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            H[:, i] = (-_neg_top_and_grad(x + e, w)[1] + _neg_top_and_grad(x - e, w)[1]) / (2 * h)
        H = (H + H.T) / 2
        if np.any(np.linalg.eigvalsh(H) >= 0):
            break
        step = np.linalg.solve(H, g)
        if np.linalg.norm(step) > 1e-2:
            break
        x = x - step
    return x


def iw_quantum(w) -> float:
    """Quantum maximum: stationary-point route away from ``w = 0``, numeric route near it."""
    if abs(float(w)) <= SINGULAR_W:
        return iw_quantum_numeric(w).lambda_max
    return iw_quantum_kkt(w).lambda_max


def optimal_strategy(w, alpha1: float, beta1: float) -> tuple[np.ndarray, list, list]:
    """Top eigenvector of the Bell operator and the observables that produce it."""
    vals, vecs = np.linalg.eigh(iw_operator(w, alpha1, beta1))
    psi = vecs[:, -1]
    return psi, [X, _xy_obs(alpha1)], [X, _xy_obs(beta1)]


def optimal_behavior(w, alpha1: float, beta1: float) -> Behavior:
    psi, a_obs, b_obs = optimal_strategy(w, alpha1, beta1)
    return behavior_from_observables(psi, a_obs, b_obs)


def tsirelson_behavior() -> Behavior:
    """Standard CHSH-optimal behavior on ``(|00> + |11>)/sqrt(2)``."""
    psi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    a_obs = [Z, X]
    b_obs = [(Z + X) / math.sqrt(2), (Z - X) / math.sqrt(2)]
    return behavior_from_observables(psi, a_obs, b_obs)
