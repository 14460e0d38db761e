"""Guessing-probability and Bell-value programs at level 2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ..behavior import Behavior, BellFunctional
from ..iw import iw_functional
from ..nosignaling import SeedBounds, tilde_mdl_functional, tilde_mdl_threshold
from .moment import Affine, MomentProblem, NpaScenario, build_npa2
from .solve import SdpResult, solve

EQ_SLACK = 1e-9


def bell_problem(f: BellFunctional) -> MomentProblem:
    p = build_npa2(NpaScenario.bipartite())
    p.objective = p.functional(f)
    p.sense = "max"
    return p


def max_functional_q2(f: BellFunctional, solver: Optional[str] = None) -> SdpResult:
    """Level-2 upper bound on the quantum value of ``f``."""
    return solve(bell_problem(f), solver=solver)


def extract_behavior(problem: MomentProblem, result: SdpResult, clamp_tol: float = 1e-7,
                     norm_tol: float = 1e-9, ns_tol: float = 1e-7) -> Behavior:
    """``P(a,b|x,y)`` read off the degree-2 moments of a solution.

    Tolerances are looser than for exact behaviors since the solver is only
    accurate to ~1e-8.
    """
    t = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    t[x, y, a, b] = problem.prob(a, b, x, y).value(result.moments)
    return Behavior(t, clamp_tol=clamp_tol, norm_tol=norm_tol, ns_tol=ns_tol)


def guess_problem(w: float, iw_value: float, setting: tuple[int, int],
                  slack: float = EQ_SLACK, at_least: bool = False) -> MomentProblem:
    """Eve's probability of guessing ``(a, b)`` at ``setting`` given ``I_w = iw_value``.

    With ``at_least`` the Bell value is only bounded from below.
    """
    x, y = setting
    p = build_npa2(NpaScenario.tripartite())
    iw = p.functional(iw_functional(w))
    # equality as two inequalities with a small slack
    p.inequalities.append((iw, iw_value - slack))
    if not at_least:
        p.inequalities.append((-iw, -iw_value - slack))
    obj = Affine()
    for a in range(2):
        for b in range(2):
            obj = obj + p.prob_e(a, b, 2 * a + b, x, y)
    p.objective = obj
    p.sense = "max"
    p.metadata.update({"w": w, "iw_value": iw_value, "setting": list(setting)})
    return p


@dataclass(frozen=True)
class GuessResult:
    guess_prob: float
    h_bits: float
    sdp: SdpResult


def guess_prob_vs_iw(w: float, iw_value: float, setting: tuple[int, int] = (1, 1),
                     solver: Optional[str] = None, slack: float = EQ_SLACK,
                     at_least: bool = False) -> GuessResult:
    """Maximal guessing probability of the outcome pair at ``setting``.

    Raises Infeasible when ``iw_value`` lies above the level-2 quantum bound.
    """
    res = solve(guess_problem(w, iw_value, setting, slack, at_least), solver=solver)
    g = min(1.0, max(res.value, 0.25))
    return GuessResult(g, -math.log2(g) + 0.0, res)


# --- measurement-dependent-locality pipeline ------------------------------------

def h_from_rule(l: float, rule: str) -> float:
    if rule == "sum":
        return 1 - 3 * l
    if rule == "third":
        return (1 - l) / 3
    raise ValueError(f"unknown rule {rule!r}; expected 'sum' or 'third'")


@dataclass(frozen=True)
class MdlPoint:
    l: float
    h: float
    tilde_max: float
    threshold: float
    guess_prob: float
    h_bits: float
    clamped: bool
    status: str


def mdl_rate_curve(w: float, l_grid: Iterable[float], rule: str = "sum",
                   setting: tuple[int, int] = (1, 1), solver: Optional[str] = None,
                   margin: float = 1e-7) -> list[MdlPoint]:
    """Certified min-entropy versus the seed lower bound ``l``.

    For each ``l``: maximize the worst-case weighted functional over the
    level-2 set, convert it to an ``I_w`` threshold, then bound Eve's guess at
    that threshold.  Thresholds are capped ``margin`` below the level-2 bound
    of ``I_w`` so that the uniform-seed endpoint stays feasible despite solver
    round-off; ``clamped`` records when that happens.
    """
    q2 = max_functional_q2(iw_functional(w), solver=solver).value
    out = []
    for l in l_grid:
        h = h_from_rule(l, rule)
        bounds = SeedBounds(l, h)
        tilde = max_functional_q2(tilde_mdl_functional(w, bounds), solver=solver).value
        thr = tilde_mdl_threshold(tilde, w, bounds)
        clamped = thr > q2 - margin
        thr_used = min(thr, q2 - margin)
        g = guess_prob_vs_iw(w, thr_used, setting, solver=solver, at_least=True)
        out.append(MdlPoint(float(l), float(h), float(tilde), float(thr), g.guess_prob, g.h_bits,
                            bool(clamped), g.sdp.status))
    return out
