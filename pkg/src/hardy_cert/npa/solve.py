"""Conic backend: solve a MomentProblem with cvxpy."""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from ..errors import Infeasible, SolverError
from .moment import MomentProblem

DEFAULT_SOLVER = "CLARABEL"
GAP_TOL = 1e-7


def solver_name() -> str:
    return os.environ.get("HARDY_CERT_SOLVER", DEFAULT_SOLVER).upper()


@dataclass
class SdpResult:
    value: float
    status: str  # optimal | near-optimal | infeasible | solver-error
    gap: float   # relative complementary-slackness residual
    min_eig: float
    moments: np.ndarray | None = None
    solver: str = ""
    metadata: dict = field(default_factory=dict)

    def moment(self, problem: MomentProblem, expr) -> float:
        return expr.value(self.moments)


def _moment_matrix(problem: MomentProblem, y: np.ndarray) -> np.ndarray:
    idx = problem.index
    G = np.where(idx >= 0, y[np.clip(idx, 0, None)], 0.0)
    return G


def solve(problem: MomentProblem, solver: str | None = None, raise_infeasible: bool = True,
          **solver_opts) -> SdpResult:
    """Solve the level-2 program; ``status='optimal'`` requires a relative gap below 1e-7."""
    solver = (solver or solver_name()).upper()
    n, m = problem.size, problem.n_moments
    y = cp.Variable(m)
    G = cp.Variable((n, n), symmetric=True)
    cons = [G >> 0, y[0] == 1]
    # tie every cell to its moment (or to zero)
    rows, cols = np.triu_indices(n)
    ids = problem.index[rows, cols]
    nz = ids >= 0
    if nz.any():
        cons.append(G[rows[nz], cols[nz]] == y[ids[nz]])
    if (~nz).any():
        cons.append(G[rows[~nz], cols[~nz]] == 0)

    def expr(a):
        return a.dense(m) @ y + a.const

    eq = [expr(a) == rhs for a, rhs in problem.equalities]
    ineq = [expr(a) >= rhs for a, rhs in problem.inequalities]
    cons += eq + ineq
    obj = expr(problem.objective)
    prob = cp.Problem(cp.Maximize(obj) if problem.sense == "max" else cp.Minimize(obj), cons)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            prob.solve(solver=solver, **solver_opts)
    except cp.error.SolverError as exc:
        raise SolverError(str(exc)) from exc

    meta = {"solver": solver, **problem.metadata}
    if prob.status in ("infeasible", "infeasible_inaccurate"):
        if raise_infeasible:
            raise Infeasible(f"moment problem infeasible ({prob.status})")
        return SdpResult(float("nan"), "infeasible", float("nan"), float("nan"), None, solver, meta)
    if prob.status not in ("optimal", "optimal_inaccurate") or y.value is None:
        return SdpResult(float("nan"), "solver-error", float("nan"), float("nan"), None, solver, meta)

    yv = np.asarray(y.value, float)
    Gv = _moment_matrix(problem, yv)
    min_eig = float(np.linalg.eigvalsh(Gv)[0])
    value = float(prob.value)
    # complementary slackness <Z, G> plus slack on the inequality rows
    Z = cons[0].dual_value
    cs = abs(float(np.sum(Z * Gv))) if Z is not None else float("nan")
    for c, (a, rhs) in zip(ineq, problem.inequalities):
        if c.dual_value is not None:
            cs += abs(float(c.dual_value) * (a.value(yv) - rhs))
    gap = cs / (1 + abs(value))
    status = "optimal" if prob.status == "optimal" and gap < GAP_TOL else "near-optimal"
    return SdpResult(value, status, gap, min_eig, yv, solver, meta)
