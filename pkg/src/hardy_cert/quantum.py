"""Born-rule evaluation of bipartite strategies."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .behavior import Behavior

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def projectors(obs: np.ndarray) -> list[np.ndarray]:
    """Outcome projectors of a +-1 observable; outcome 0 is the +1 eigenspace."""
    d = obs.shape[0]
    eye = np.eye(d, dtype=complex)
    return [(eye + obs) / 2, (eye - obs) / 2]


def behavior_from_projectors(psi: np.ndarray,
                             alice: Sequence[Sequence[np.ndarray]],
                             bob: Sequence[Sequence[np.ndarray]], **kw) -> Behavior:
    """``P(a,b|x,y) = <psi| A_{a|x} (x) B_{b|y} |psi>`` for a pure state ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    nx, ny = len(alice), len(bob)
    na, nb = len(alice[0]), len(bob[0])
    t = np.zeros((nx, ny, na, nb))
    for x in range(nx):
        for y in range(ny):
            for a in range(na):
                for b in range(nb):
                    t[x, y, a, b] = np.real(np.vdot(psi, np.kron(alice[x][a], bob[y][b]) @ psi))
    return Behavior(t, **kw)


def behavior_from_observables(psi: np.ndarray,
                              alice_obs: Sequence[np.ndarray],
                              bob_obs: Sequence[np.ndarray], **kw) -> Behavior:
    return behavior_from_projectors(psi, [projectors(o) for o in alice_obs],
                                    [projectors(o) for o in bob_obs], **kw)


def min_entropy(probs) -> float:
    return float(-np.log2(np.max(probs)))
