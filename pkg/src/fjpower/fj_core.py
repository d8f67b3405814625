"""Ground-truth engine: opinion updates, social power, resolvent identities.

Conventions
-----------
* ``gamma`` (self-appraisal weights) and perceived-power vectors are plain
  float ndarrays.
* ``W(w) = diag(w) + (I - diag(w)) C`` blends self-weight ``w_i`` with the
  interaction row of ``C``; its rows sum to 1 for any real ``w`` because
  ``C`` is row-stochastic.
* Social power of a group discussing one issue with fixed ``gamma``:
  ``x = (I - A)(I - W(gamma)^T A)^{-1} 1/n`` — nonnegative, sums to 1.
* All ``(I - M)^{-1} b`` computations go through LU solves.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import SingularSystemError
from .network import InfluenceNetwork, enumerate_stubborn_cycles


def influence_matrix(C: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """W = diag(weights) + (I - diag(weights)) @ C, for any real weights."""
    w = np.asarray(weights, dtype=float)
    return np.diag(w) + (1.0 - w)[:, None] * np.asarray(C, dtype=float)


def _solve(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(M, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc


@dataclass(frozen=True)
class OpinionState:
    """Opinions mid-discussion: current vector, anchored initial vector, clocks."""

    y: np.ndarray
    y0: np.ndarray
    issue: int = 0
    step: int = 0

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        y0 = np.asarray(self.y0, dtype=float)
        if y.shape != y0.shape:
            raise ValueError(f"y {y.shape} and y0 {y0.shape} differ in length")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "y0", y0)


def step_fj_opinions(
    net: InfluenceNetwork, gamma: np.ndarray, state: OpinionState
) -> OpinionState:
    """One opinion update: y' = A W(gamma) y + (I - A) y0."""
    W = influence_matrix(net.C, gamma)
    y_next = net.a * (W @ state.y) + (1.0 - net.a) * state.y0
    return replace(state, y=y_next, step=state.step + 1)


def final_opinions(net: InfluenceNetwork, gamma: np.ndarray, y0: np.ndarray) -> np.ndarray:
    """Discussion limit (I - A W(gamma))^{-1} (I - A) y0, by direct solve."""
    n = net.n
    W = influence_matrix(net.C, gamma)
    return _solve(np.eye(n) - net.a[:, None] * W, (1.0 - net.a) * np.asarray(y0, float))


def compute_social_power(net: InfluenceNetwork, gamma: np.ndarray) -> np.ndarray:
    """Social power x = (I - A)(I - W(gamma)^T A)^{-1} 1/n.

    Each x_i is the normalized total weight of node i's initial opinion in
    everyone's final opinion.  Nonnegative with unit sum.
    """
    n = net.n
    W = influence_matrix(net.C, gamma)
    u = _solve(np.eye(n) - W.T * net.a[None, :], np.full(n, 1.0 / n))
    return (1.0 - net.a) * u


def influence_resolvent(net: InfluenceNetwork, x: np.ndarray) -> np.ndarray:
    """Resolvent (I - A W(x))^{-1}: cumulative susceptibility-weighted flows.

    Nonnegative with strictly positive diagonal for x in the open simplex;
    multiplying by (I - A) on the right gives a row-stochastic matrix.
    """
    n = net.n
    W = influence_matrix(net.C, np.asarray(x, dtype=float))
    return _solve(np.eye(n) - net.a[:, None] * W, np.eye(n))


def resolvent_diag_from_cycles(
    net: InfluenceNetwork, anchor: int, x: np.ndarray, budget: int = 1_000_000
) -> float:
    """Diagonal resolvent entry rebuilt from the cycles through ``anchor``.

    Every simple cycle q through the anchor whose other nodes are partially
    stubborn contributes its edge-weight product times
    ``prod_{l in q, l != anchor} a_l (1 - x_l) / (1 - a_l x_l)``; the diagonal
    entry is ``1 / (1 - a_i x_i - a_i (1 - x_i) phi)`` with ``phi`` that sum.
    With no such cycle the entry collapses to ``1 / (1 - a_i x_i)``, and to 1
    for a fully stubborn anchor.
    """
    x = np.asarray(x, dtype=float)
    a = net.a
    i = anchor
    cycles = enumerate_stubborn_cycles(net, anchor, budget=budget)
    phi = 0.0
    for cyc in cycles:
        eta = 1.0
        for l in cyc.nodes[1:-1]:
            eta *= a[l] * (1.0 - x[l]) / (1.0 - a[l] * x[l])
        phi += cyc.value * eta
    return 1.0 / (1.0 - a[i] * x[i] - a[i] * (1.0 - x[i]) * phi)


def step_power_evolution(net: InfluenceNetwork, x: np.ndarray) -> np.ndarray:
    """Issue-to-issue power update: next power when self-appraisals equal x.

    x' = (I - A)(I - W(x)^T A)^{-1} 1/n.  Maps the simplex into itself.
    """
    return compute_social_power(net, np.asarray(x, dtype=float))


def step_power_evolution_single(
    net: InfluenceNetwork, V: np.ndarray, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-step variant tracking the contribution matrix V alongside x.

    V' = A W(x) V + (I - A);  x' = V'^T 1/n.  Start from V = I; x may be any
    simplex point (it only seeds the first blend).
    """
    n = net.n
    W = influence_matrix(net.C, np.asarray(x, dtype=float))
    V_next = net.a[:, None] * (W @ V)
    V_next[np.diag_indices(n)] += 1.0 - net.a
    x_next = V_next.T @ np.full(n, 1.0 / n)
    return V_next, x_next
