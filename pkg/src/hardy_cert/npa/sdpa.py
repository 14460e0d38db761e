"""Sparse SDPA (.dat-s) export and import of moment problems.

SDPA form: minimize ``c.x`` subject to ``sum_i x_i F_i - F_0 >= 0`` (PSD per
block).  The free variables are the moments other than the identity.  Block 1
is the moment matrix; block 2 is diagonal and holds the linear rows
(inequalities as written, each equality as a pair).  A maximization is
exported as minimization of the negated objective; the sign and constant are
kept in the header comments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .moment import Affine, MomentProblem


@dataclass
class SdpaData:
    c: np.ndarray                      # (m,)
    block_struct: list[int]            # positive: dense block size; negative: diagonal
    mats: list[list[np.ndarray]]       # mats[i][b] for i = 0..m (F_0 first)
    comments: list[str] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.c)

    def header_value(self, key: str, default=None):
        for line in self.comments:
            if line.startswith(key + "="):
                return line.split("=", 1)[1]
        return default


def _linear_rows(problem: MomentProblem) -> list[tuple[Affine, float]]:
    rows = list(problem.inequalities)
    for a, rhs in problem.equalities:
        rows.append((a, rhs))
        rows.append((-a, -rhs))
    return rows


def to_sdpa(problem: MomentProblem) -> SdpaData:
    n, M = problem.size, problem.n_moments
    m = M - 1
    rows = _linear_rows(problem)
    nrows = len(rows)
    blocks = [n] + ([-nrows] if nrows else [])
    mats = [[np.zeros((n, n))] + ([np.zeros(nrows)] if nrows else []) for _ in range(m + 1)]
    idx = problem.index
    for i in range(n):
        for j in range(n):
            k = idx[i, j]
            if k < 0:
                continue
            if k == 0:
                mats[0][0][i, j] = -1.0  # identity moment moves to the constant side
            else:
                mats[k][0][i, j] = 1.0
    for r, (a, rhs) in enumerate(rows):
        # a.y + const >= rhs, with y_0 = 1
        mats[0][1][r] = rhs - a.const - a.coef.get(0, 0.0)
        for k, v in a.coef.items():
            if k:
                mats[k][1][r] += v
    sign = -1.0 if problem.sense == "max" else 1.0
    obj = problem.objective
    c = np.zeros(m)
    for k, v in obj.coef.items():
        if k:
            c[k - 1] += sign * v
    const = obj.const + obj.coef.get(0, 0.0)
    comments = [f"sense={problem.sense}", f"objective_constant={const!r}",
                f"n_moments={M}", f"level={problem.metadata.get('level', 2)}"]
    return SdpaData(c, blocks, mats, comments)


def format_sdpa(data: SdpaData) -> str:
    out = [f'"{line}' for line in data.comments]
    out.append(str(data.m))
    out.append(str(len(data.block_struct)))
    out.append(" ".join(str(b) for b in data.block_struct))
    out.append(" ".join(repr(float(v)) for v in data.c) if data.m else "")
    for i, blocks in enumerate(data.mats):
        for b, (size, mat) in enumerate(zip(data.block_struct, blocks), start=1):
            if size < 0:
                for r in np.flatnonzero(mat):
                    out.append(f"{i} {b} {r + 1} {r + 1} {float(mat[r])!r}")
            else:
                ii, jj = np.nonzero(np.triu(mat))
                for r, s in zip(ii, jj):
                    out.append(f"{i} {b} {r + 1} {s + 1} {float(mat[r, s])!r}")
    return "\n".join(out) + "\n"


def export_sdpa(problem: MomentProblem, path) -> SdpaData:
    data = to_sdpa(problem)
    with open(path, "w") as fh:
        fh.write(format_sdpa(data))
    return data


def parse_sdpa(text: str) -> SdpaData:
    comments, body = [], []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s[0] in '"*':
            comments.append(s[1:])
        else:
            body.append(s)
    m = int(body[0].split()[0])
    nb = int(body[1].split()[0])
    blocks = [int(v) for v in body[2].replace(",", " ").replace("{", " ").replace("}", " ").split()[:nb]]
    if m:
        c = np.array([float(v) for v in body[3].replace(",", " ").split()[:m]])
        entries = body[4:]
    else:
        c = np.zeros(0)
        entries = body[3:]
    mats = [[np.zeros(-b) if b < 0 else np.zeros((b, b)) for b in blocks] for _ in range(m + 1)]
    for line in entries:
        i, b, r, s, v = line.split()
        i, b, r, s = int(i), int(b) - 1, int(r) - 1, int(s) - 1
        val = float(v)
        if blocks[b] < 0:
            mats[i][b][r] = val
        else:
            mats[i][b][r, s] = val
            mats[i][b][s, r] = val
    return SdpaData(c, blocks, mats, comments)


def read_sdpa(path) -> SdpaData:
    with open(path) as fh:
        return parse_sdpa(fh.read())


def solve_sdpa(data: SdpaData, solver: str | tuple[str, ...] = ("CVXOPT", "CLARABEL")) -> float:
    """Solve SDPA data directly, independent of the moment-problem assembly.

    ``solver`` may be a fallback sequence.  Returns the value of the original
    problem (sign and constant restored).
    """
    import cvxpy as cp

    x = cp.Variable(data.m)
    cons = []
    for b, size in enumerate(data.block_struct):
        F0 = data.mats[0][b]
        if size < 0:
            expr = sum((data.mats[i + 1][b] * x[i] for i in range(data.m)
                        if np.any(data.mats[i + 1][b])), start=-F0)
            cons.append(expr >= 0)
        else:
            expr = sum((data.mats[i + 1][b] * x[i] for i in range(data.m)
                        if np.any(data.mats[i + 1][b])), start=-F0)
            # symmetrize explicitly so the PSD cone sees a symmetric argument
            cons.append((expr + expr.T) / 2 >> 0)
    prob = cp.Problem(cp.Minimize(data.c @ x), cons)
    solvers = (solver,) if isinstance(solver, str) else tuple(solver)
    for i, name in enumerate(solvers):
        try:
            prob.solve(solver=name)
            break
        except cp.error.SolverError:
            if i == len(solvers) - 1:
                raise
    v = float(prob.value)
    const = float(data.header_value("objective_constant", "0.0"))
    if data.header_value("sense", "min") == "max":
        return -v + const
    return v + const
