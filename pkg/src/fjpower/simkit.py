"""Round-based multi-agent simulation enforcing the locality contract.

Each agent owns exactly its :class:`~fjpower.perception.LocalView`, its own
current estimate, and an inbox.  A round has two phases: every agent
broadcasts its estimate to the nodes it accords weight to (the message
fabric routes by the network's edges), then every agent computes its next
estimate from its view, its own value and its inbox — nothing else is
reachable from the update functions.  Rounds are synchronous; inbox slots
are overwritten each round.

Batch execution of scenario files also lives here; per-scenario failures are
captured in the summaries so a batch never aborts midway.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .network import InfluenceNetwork
from .perception import (
    DEFAULT_DIVERGENCE_BOUND,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    CONVERGED,
    DIVERGED,
    ISSUE,
    MAX_ITER,
    LocalView,
    Trajectory,
    build_local_views,
    homogeneous_susceptibility,
    local_step_homogeneous,
    local_step_no_ra,
    local_step_ra,
)

MODE_NO_RA = "no_ra"
MODE_RA = "ra"
MODE_HOMOGENEOUS = "homogeneous"

_LOCAL_STEPPERS = {
    MODE_NO_RA: local_step_no_ra,
    MODE_RA: local_step_ra,
    MODE_HOMOGENEOUS: local_step_homogeneous,
}


@dataclass
class Agent:
    """One node: a view, a scalar estimate, and an inbox of neighbor values."""

    view: LocalView
    p: float
    inbox: dict[int, float] = field(default_factory=dict)

    @property
    def node(self) -> int:
        return self.view.node


@dataclass(frozen=True)
class Round:
    """Bookkeeping for one synchronous round."""

    index: int
    messages_delivered: int
    post_state: np.ndarray

    def __post_init__(self):
        snap = np.array(self.post_state, dtype=float, copy=True)
        snap.setflags(write=False)
        object.__setattr__(self, "post_state", snap)


def make_agents(
    net: InfluenceNetwork,
    mode: str,
    p0: np.ndarray,
    gamma: Optional[np.ndarray] = None,
) -> list[Agent]:
    """Agents with freshly built views; ``gamma`` is required for no_ra mode."""
    if mode not in _LOCAL_STEPPERS:
        raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(_LOCAL_STEPPERS)}")
    if mode == MODE_NO_RA and gamma is None:
        raise ValueError("no_ra mode needs a self-weight vector gamma")
    if mode != MODE_NO_RA and gamma is not None:
        raise ValueError(f"{mode} mode takes no gamma")
    if mode == MODE_HOMOGENEOUS:
        homogeneous_susceptibility(net)
    views = build_local_views(net, gamma if mode == MODE_NO_RA else None)
    p0 = np.asarray(p0, dtype=float)
    return [Agent(view=v, p=float(p0[v.node])) for v in views]


def deliver(net: InfluenceNetwork, agents: Sequence[Agent]) -> int:
    """Broadcast phase: each agent's estimate reaches its out-neighbors.

    Returns the number of messages delivered (one per directed edge).
    """
    count = 0
    for ag in agents:
        for k in net.out_neighbors(ag.node):
            agents[k].inbox[ag.node] = ag.p
            count += 1
    return count


def advance(agents: Sequence[Agent], mode: str) -> np.ndarray:
    """Compute phase: every agent updates from (view, own value, inbox) only."""
    local = _LOCAL_STEPPERS[mode]
    new_values = [local(ag.view, ag.p, ag.inbox) for ag in agents]
    for ag, value in zip(agents, new_values):
        ag.p = value
    return np.array(new_values)


def run_round(net: InfluenceNetwork, agents: Sequence[Agent], mode: str, index: int) -> Round:
    """One full broadcast+compute round, for inspection in tests."""
    delivered = deliver(net, agents)
    snapshot = advance(agents, mode)
    return Round(index=index, messages_delivered=delivered, post_state=snapshot)


def run_distributed(
    net: InfluenceNetwork,
    mode: str,
    p0: np.ndarray,
    gamma: Optional[np.ndarray] = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
    timescale: str = ISSUE,
) -> Trajectory:
    """Run the round-based simulation until the usual stop rules fire.

    Mirrors the centralized steppers' semantics: CONVERGED on a sup-norm
    increment below ``tol``, DIVERGED past ``divergence_bound``, MAX_ITER
    otherwise.  Per-agent sums run over ascending in-neighbor ids with the
    same term association as the vectorized steppers, so trajectories
    reproduce theirs bit-for-bit, even along diverging runs.
    """
    agents = make_agents(net, mode, p0, gamma)
    p = np.array([ag.p for ag in agents])
    states = [p]
    status = MAX_ITER
    if np.any(np.abs(p) > divergence_bound):
        return Trajectory(np.array(states), DIVERGED, timescale, tol)
    for index in range(max_iter):
        snapshot = run_round(net, agents, mode, index).post_state
        states.append(snapshot)
        if np.any(np.abs(snapshot) > divergence_bound):
            status = DIVERGED
            break
        if np.max(np.abs(snapshot - p)) < tol:
            status = CONVERGED
            break
        p = snapshot
    return Trajectory(np.array(states), status, timescale, tol)


def run_batch(scenarios: Sequence, parallelism: int = 1, out_dir=None) -> list:
    """Run many scenarios; per-scenario errors become summary entries.

    ``scenarios`` holds loaded scenario objects; results keep the input
    order.  ``parallelism`` > 1 farms scenarios out to a thread pool —
    results are deterministic either way since scenarios are independent.
    ``out_dir`` is forwarded to each run.
    """
    from .scenario import run_scenario, error_result  # lazy: scenario imports simkit

    def one(scn):
        try:
            return run_scenario(scn, out_dir=out_dir)
        except Exception as exc:  # noqa: BLE001 — batch must never abort
            return error_result(scn, exc)

    if parallelism > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            return list(pool.map(one, scenarios))
    return [one(scn) for scn in scenarios]
