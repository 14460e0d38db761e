"""Boxes, Bell functionals and classical bounds by deterministic enumeration.

A behavior is stored as a dense table ``p[x, y, a, b] = P(a, b | x, y)``.
The scenarios handled here are small, so the classical (LHV) value of a
functional is obtained by brute force over deterministic strategies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import CapExceeded, DimensionMismatch, NotNormalized

DEFAULT_CAP = 10**7
CLAMP_TOL = 1e-12
NORM_TOL = 1e-12
NS_TOL = 1e-10

# (a, b, x, y) index of a single probability entry
Entry = tuple[int, int, int, int]


class Scenario(NamedTuple):
    nx: int
    ny: int
    na: int
    nb: int

    @property
    def n_strategies(self) -> int:
        return self.na**self.nx * self.nb**self.ny


class Behavior:
    """Conditional distribution ``P(a,b|x,y)`` with index order ``x, y, a, b``.

    Entries slightly below zero (round-off from solvers) are clamped; anything
    below ``-clamp_tol`` is rejected.  Normalization and no-signalling are
    checked on construction at ``norm_tol`` and ``ns_tol``.
    """

    def __init__(self, table, *, clamp_tol=CLAMP_TOL, norm_tol=NORM_TOL, ns_tol=NS_TOL):
        t = np.array(table, dtype=float)
        if t.ndim != 4 or min(t.shape) < 1:
            raise DimensionMismatch(f"behavior table must be 4-d (x,y,a,b), got shape {t.shape}")
        if t.min() < -clamp_tol:
            raise ValueError(f"negative probability {t.min():.3e} below clamp tolerance")
        t = np.clip(t, 0.0, 1.0)
        sums = t.sum(axis=(2, 3))
        if np.max(np.abs(sums - 1.0)) > norm_tol:
            raise NotNormalized(f"behavior not normalized (max deviation {np.max(np.abs(sums - 1.0)):.3e})")
        t.setflags(write=False)
        self._t = t
        dev = self.signalling()
        if dev > ns_tol:
            raise ValueError(f"behavior is signalling (deviation {dev:.3e})")

    @property
    def table(self) -> np.ndarray:
        return self._t

    @property
    def scenario(self) -> Scenario:
        return Scenario(*self._t.shape)

    def __call__(self, a: int, b: int, x: int, y: int) -> float:
        return float(self._t[x, y, a, b])

    def marginal_a(self) -> np.ndarray:
        """``P_A(a|x)`` as an ``(nx, na)`` array, read off at ``y = 0``."""
        return self._t[:, 0].sum(axis=2)

    def marginal_b(self) -> np.ndarray:
        """``P_B(b|y)`` as an ``(ny, nb)`` array, read off at ``x = 0``."""
        return self._t[0, :].sum(axis=1)

    def signalling(self) -> float:
        """Largest violation of the no-signalling conditions."""
        ma = self._t.sum(axis=3)  # (x, y, a)
        mb = self._t.sum(axis=2)  # (x, y, b)
        da = np.max(np.abs(ma - ma[:, :1, :])) if ma.shape[1] > 1 else 0.0
        db = np.max(np.abs(mb - mb[:1, :, :])) if mb.shape[0] > 1 else 0.0
        return float(max(da, db))

    def mix(self, other: "Behavior", alpha: float) -> "Behavior":
        return Behavior(alpha * self._t + (1 - alpha) * other.table)

    def to_json(self) -> dict:
        nx, ny, na, nb = self.scenario
        return {"nx": nx, "ny": ny, "na": na, "nb": nb, "p": self._t.tolist()}

    @classmethod
    def from_json(cls, data: dict, **kw) -> "Behavior":
        t = np.asarray(data["p"], dtype=float)
        expected = (data["nx"], data["ny"], data["na"], data["nb"])
        if t.shape != expected:
            raise DimensionMismatch(f"declared shape {expected} but table has {t.shape}")
        return cls(t, **kw)

    def __repr__(self) -> str:
        return f"Behavior{tuple(self.scenario)}"


@dataclass(frozen=True)
class BellFunctional:
    """Linear functional on behaviors.

    ``joint[x, y, a, b]`` multiplies ``P(a,b|x,y)``, ``marg_a[x, a]`` and
    ``marg_b[y, b]`` multiply the marginals, and ``offset`` is added.
    """

    joint: np.ndarray
    marg_a: np.ndarray
    marg_b: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        j = np.asarray(self.joint, dtype=float)
        nx, ny, na, nb = j.shape
        ma = np.zeros((nx, na)) if self.marg_a is None else np.asarray(self.marg_a, dtype=float)
        mb = np.zeros((ny, nb)) if self.marg_b is None else np.asarray(self.marg_b, dtype=float)
        if ma.shape != (nx, na) or mb.shape != (ny, nb):
            raise DimensionMismatch("marginal coefficient shapes do not match joint coefficients")
        object.__setattr__(self, "joint", j)
        object.__setattr__(self, "marg_a", ma)
        object.__setattr__(self, "marg_b", mb)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def zeros(cls, scenario: Sequence[int]) -> "BellFunctional":
        nx, ny, na, nb = scenario
        return cls(np.zeros((nx, ny, na, nb)), None, None, 0.0)

    @classmethod
    def from_entries(cls, scenario: Sequence[int], terms: dict[Entry, float], offset=0.0) -> "BellFunctional":
        """Build from ``{(a, b, x, y): coefficient}``."""
        j = np.zeros(tuple(scenario))
        for (a, b, x, y), c in terms.items():
            j[x, y, a, b] += c
        return cls(j, None, None, offset)

    @property
    def scenario(self) -> Scenario:
        return Scenario(*self.joint.shape)

    def __call__(self, p: Behavior) -> float:
        return evaluate(self, p)

    def __add__(self, other: "BellFunctional") -> "BellFunctional":
        if self.scenario != other.scenario:
            raise DimensionMismatch("cannot add functionals on different scenarios")
        return BellFunctional(self.joint + other.joint, self.marg_a + other.marg_a,
                              self.marg_b + other.marg_b, self.offset + other.offset)

    def __mul__(self, k: float) -> "BellFunctional":
        return BellFunctional(k * self.joint, k * self.marg_a, k * self.marg_b, k * self.offset)

    __rmul__ = __mul__

    def __sub__(self, other: "BellFunctional") -> "BellFunctional":
        return self + (-1.0) * other

    def shifted(self, c: float) -> "BellFunctional":
        return BellFunctional(self.joint, self.marg_a, self.marg_b, self.offset + c)

    def as_joint(self) -> "BellFunctional":
        """Equivalent functional with marginal terms folded into joint coefficients.

        Uses ``P_A(a|x) = sum_b P(a,b|x,0)`` and ``P_B(b|y) = sum_a P(a,b|0,y)``,
        valid on no-signalling behaviors.
        """
        j = self.joint.copy()
        j[:, 0, :, :] += self.marg_a[:, :, None]
        j[0, :, :, :] += self.marg_b[:, None, :]
        return BellFunctional(j, None, None, self.offset)


def evaluate(f: BellFunctional, p: Behavior) -> float:
    if f.scenario != p.scenario:
        raise DimensionMismatch(f"functional scenario {tuple(f.scenario)} != behavior {tuple(p.scenario)}")
    t = p.table
    return float(np.sum(f.joint * t) + np.sum(f.marg_a * p.marginal_a())
                 + np.sum(f.marg_b * p.marginal_b()) + f.offset)


@dataclass(frozen=True)
class DeterministicBox:
    """Local deterministic strategy: Alice outputs ``a[x]``, Bob outputs ``b[y]``."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    na: int = 2
    nb: int = 2

    @property
    def key(self) -> tuple[int, ...]:
        return self.a + self.b

    def table(self) -> np.ndarray:
        t = np.zeros((len(self.a), len(self.b), self.na, self.nb))
        for x, ax in enumerate(self.a):
            for y, by in enumerate(self.b):
                t[x, y, ax, by] = 1.0
        return t

    def behavior(self) -> Behavior:
        return Behavior(self.table())

    def hits(self, entry: Entry) -> bool:
        a, b, x, y = entry
        return self.a[x] == a and self.b[y] == b


def _check_cap(scenario: Scenario, cap: int) -> None:
    if min(scenario) < 1:
        raise ValueError(f"all input/output counts must be >= 1, got {tuple(scenario)}")
    n = scenario.n_strategies
    if n > cap:
        raise CapExceeded(f"{n} deterministic strategies exceed cap {cap}")


def _strategies(n_inputs: int, n_outputs: int) -> np.ndarray:
    return np.array(list(itertools.product(range(n_outputs), repeat=n_inputs)), dtype=int).reshape(-1, n_inputs)


def enumerate_deterministic(scenario: Sequence[int], cap: int = DEFAULT_CAP) -> list[DeterministicBox]:
    """All deterministic boxes in lexicographic order of ``a + b``."""
    sc = Scenario(*scenario)
    _check_cap(sc, cap)
    return [DeterministicBox(tuple(sa), tuple(sb), sc.na, sc.nb)
            for sa in itertools.product(range(sc.na), repeat=sc.nx)
            for sb in itertools.product(range(sc.nb), repeat=sc.ny)]


def satisfying(boxes: Iterable[DeterministicBox], zeros: Iterable[Entry]) -> list[DeterministicBox]:
    zeros = list(zeros)
    return [d for d in boxes if not any(d.hits(z) for z in zeros)]


def _value_grid(f: BellFunctional, sa: np.ndarray, sb: np.ndarray) -> np.ndarray:
    nx, ny = f.scenario.nx, f.scenario.ny
    v = np.zeros((len(sa), len(sb)))
    for x in range(nx):
        v += f.marg_a[x][sa[:, x]][:, None]
        for y in range(ny):
            v += f.joint[x, y][np.ix_(sa[:, x], sb[:, y])]
    for y in range(ny):
        v += f.marg_b[y][sb[:, y]][None, :]
    return v + f.offset


def classical_bound(f: BellFunctional, cap: int = DEFAULT_CAP, tol: float = 1e-12) -> tuple[float, DeterministicBox]:
    """Maximum of ``f`` over deterministic boxes and the lexicographically first maximizer."""
    sc = f.scenario
    _check_cap(sc, cap)
    sa = _strategies(sc.nx, sc.na)
    sb = _strategies(sc.ny, sc.nb)
    # best response of Bob to each Alice strategy keeps memory at O(|sa| * ny * nb)
    resp = np.tile(f.marg_b[:, None, :], (1, len(sa), 1))  # (y, sa, b)
    alice = np.zeros(len(sa))
    for x in range(sc.nx):
        alice += f.marg_a[x][sa[:, x]]
        resp += f.joint[x][:, sa[:, x], :]
    best_b = resp.max(axis=2)
    totals = alice + best_b.sum(axis=0) + f.offset
    top = totals.max()
    i = int(np.flatnonzero(totals >= top - tol)[0])
    b = tuple(int(np.flatnonzero(resp[y, i] >= best_b[y, i] - tol)[0]) for y in range(sc.ny))
    box = DeterministicBox(tuple(int(v) for v in sa[i]), b, sc.na, sc.nb)
    return float(top), box


def constrained_classical_bound(f: BellFunctional, zeros: Iterable[Entry], cap: int = DEFAULT_CAP) -> float:
    """Max of ``f`` over deterministic boxes assigning probability 0 to every entry in ``zeros``.

    Returns ``-inf`` when no deterministic box survives.
    """
    sc = f.scenario
    _check_cap(sc, cap)
    sa = _strategies(sc.nx, sc.na)
    sb = _strategies(sc.ny, sc.nb)
    ok = np.ones((len(sa), len(sb)), dtype=bool)
    for a, b, x, y in zeros:
        ok &= ~np.outer(sa[:, x] == a, sb[:, y] == b)
    if not ok.any():
        return float("-inf")
    return float(_value_grid(f, sa, sb)[ok].max())
