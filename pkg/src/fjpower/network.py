"""Influence-network data model, validation, topology classing and cycle search.

A network couples a row-stochastic, zero-diagonal, nonnegative interaction
matrix ``C`` with a susceptibility vector ``a`` (``0 <= a_i < 1``, not all
zero).  Node ``i`` is *fully stubborn* when ``a_i == 0`` and *partially
stubborn* when ``0 < a_i < 1``.  Indices are 0-based everywhere inside the
package; user-facing output (reports, messages) adds 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import CycleBudgetExceededError

ROW_SUM_TOL = 1e-12

STAR_FULL_CENTER = "star_fully_stubborn_center"
STAR_PARTIAL_CENTER = "star_partially_stubborn_center"
GENERAL = "general"


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Violation:
    """One failed invariant: machine-readable name plus a 1-based location."""

    name: str
    message: str
    index: Optional[int] = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(f"{v.name}: {v.message}" for v in self.violations)


def validate_arrays(C, a, tol: float = ROW_SUM_TOL) -> ValidationReport:
    """Check a candidate (C, a) pair against every network invariant.

    Never raises: all failures are collected into the report.

    Parameters
    ----------
    C : (n, n) array_like
        Candidate interaction matrix.
    a : (n,) array_like
        Candidate susceptibilities.
    tol : float
        Row-stochasticity tolerance.
    """
    out: list[Violation] = []
    C = np.asarray(C, dtype=float)
    a = np.asarray(a, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        out.append(Violation("shape", f"C must be square, got {C.shape}"))
        return ValidationReport(tuple(out))
    n = C.shape[0]
    if n < 2:
        out.append(Violation("size", f"need at least 2 nodes, got {n}"))
    if a.shape != (n,):
        out.append(Violation("shape", f"a must have length {n}, got {a.shape}"))
        return ValidationReport(tuple(out))
    for i in range(n):
        if C[i, i] != 0.0:
            out.append(
                Violation("zero_diagonal", f"C[{i + 1},{i + 1}] = {C[i, i]} is nonzero", i)
            )
    rows, cols = np.nonzero(C < 0)
    for i, j in zip(rows, cols):
        out.append(
            Violation("nonnegative", f"C[{i + 1},{j + 1}] = {C[i, j]} is negative", int(i))
        )
    row_sums = C.sum(axis=1)
    for i in range(n):
        if abs(row_sums[i] - 1.0) > tol:
            out.append(
                Violation(
                    "row_stochastic",
                    f"row {i + 1} of C sums to {row_sums[i]!r}, not 1 within {tol}",
                    i,
                )
            )
    for i in range(n):
        if not (0.0 <= a[i] < 1.0):
            out.append(
                Violation(
                    "susceptibility_range",
                    f"a[{i + 1}] = {a[i]} outside [0, 1)",
                    i,
                )
            )
    if a.shape == (n,) and np.all(a == 0.0):
        out.append(
            Violation("not_all_fully_stubborn", "a is the zero vector; at least one a_i > 0 required")
        )
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class InfluenceNetwork:
    """Validated (C, a) pair.  Immutable; safe to share across threads."""

    C: np.ndarray
    a: np.ndarray
    validated: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "C", _freeze(self.C))
        object.__setattr__(self, "a", _freeze(self.a))
        if self.validated:
            report = validate_arrays(self.C, self.a)
            if not report.ok:
                raise ValueError(f"invalid network: {report}")

    @classmethod
    def from_arrays(cls, C, a, renormalize_rows: bool = False) -> "InfluenceNetwork":
        """Build a validated network; optionally renormalize rows of C first.

        Silent renormalization hides data errors, so it only happens when
        explicitly asked for.
        """
        C = np.array(C, dtype=float)
        if renormalize_rows:
            sums = C.sum(axis=1)
            if np.any(sums <= 0):
                raise ValueError("cannot renormalize: a row of C sums to <= 0")
            C = C / sums[:, None]
        return cls(C=C, a=np.asarray(a, dtype=float))

    @classmethod
    def unchecked(cls, C, a) -> "InfluenceNetwork":
        """Carrier without invariant enforcement (for limiting-case math)."""
        return cls(C=np.asarray(C, dtype=float), a=np.asarray(a, dtype=float), validated=False)

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def fully_stubborn(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.a == 0.0)[0])

    @property
    def partially_stubborn(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.a > 0.0)[0])

    def in_neighbors(self, i: int) -> tuple[int, ...]:
        """Nodes j with C[j, i] > 0, ascending."""
        return tuple(int(j) for j in np.nonzero(self.C[:, i] > 0.0)[0])

    def out_neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(int(j) for j in np.nonzero(self.C[i, :] > 0.0)[0])


def validate_network(net: InfluenceNetwork) -> ValidationReport:
    """Re-check a (possibly unchecked) network carrier."""
    return validate_arrays(net.C, net.a)


@dataclass(frozen=True)
class TopologyClass:
    """Structural class. ``center`` is 0-based; only set for star variants."""

    kind: str
    center: Optional[int] = None

    @property
    def is_star(self) -> bool:
        return self.kind in (STAR_FULL_CENTER, STAR_PARTIAL_CENTER)

    def __str__(self) -> str:
        if self.center is None:
            return self.kind
        return f"{self.kind}({self.center + 1})"


def classify_topology(net: InfluenceNetwork) -> TopologyClass:
    """Classify as a star (every edge incident to one center) or general.

    When several nodes qualify as center (only possible for n = 2) the
    lowest-index one wins.
    """
    edges = list(zip(*np.nonzero(net.C > 0.0)))
    for c in range(net.n):
        if all(i == c or j == c for i, j in edges):
            if net.a[c] == 0.0:
                return TopologyClass(STAR_FULL_CENTER, c)
            return TopologyClass(STAR_PARTIAL_CENTER, c)
    return TopologyClass(GENERAL)


@dataclass(frozen=True)
class StubbornPath:
    """A directed path or simple cycle with all interior nodes partially stubborn.

    ``nodes`` lists the visited node sequence; for a cycle the anchor
    reappears at the end.  ``value`` is the product of the edge weights along
    the sequence.
    """

    nodes: tuple[int, ...]
    value: float
    is_cycle: bool


def enumerate_stubborn_cycles(
    net: InfluenceNetwork, anchor: int, budget: int = 1_000_000
) -> list[StubbornPath]:
    """All simple cycles through ``anchor`` whose other nodes are partially stubborn.

    The search walks the subgraph induced by the partially stubborn nodes plus
    the anchor, emitting cycles in lexicographic order of their node sequence.
    Raises :class:`CycleBudgetExceededError` beyond ``budget`` cycles.
    """
    n = net.n
    if not (0 <= anchor < n):
        raise IndexError(f"anchor {anchor} out of range for n={n}")
    partial = net.a > 0.0
    C = net.C
    found: list[StubbornPath] = []
    path = [anchor]
    on_path = np.zeros(n, dtype=bool)
    on_path[anchor] = True
    # iterative DFS; each stack frame is an iterator over sorted out-neighbors
    stack: list[Iterator[int]] = [iter(net.out_neighbors(anchor))]
    weight = [1.0]
    while stack:
        advanced = False
        for nxt in stack[-1]:
            if nxt == anchor:
                nodes = tuple(path) + (anchor,)
                found.append(
                    StubbornPath(nodes=nodes, value=weight[-1] * C[path[-1], anchor], is_cycle=True)
                )
                if len(found) > budget:
                    raise CycleBudgetExceededError(anchor, budget)
                continue
            if partial[nxt] and not on_path[nxt]:
                on_path[nxt] = True
                weight.append(weight[-1] * C[path[-1], nxt])
                path.append(nxt)
                stack.append(iter(net.out_neighbors(nxt)))
                advanced = True
                break
        if not advanced:
            stack.pop()
            dropped = path.pop()
            on_path[dropped] = False
            weight.pop()
    return found


def _reachable_through_partial(net: InfluenceNetwork, start_set: Sequence[int]) -> np.ndarray:
    """Nodes reachable from ``start_set`` moving only across partially stubborn nodes.

    A node enters the reach set if some already-reached partially stubborn node
    (or a start node) points at it; expansion continues from partially stubborn
    nodes only.
    """
    n = net.n
    partial = net.a > 0.0
    seen = np.zeros(n, dtype=bool)
    frontier = list(start_set)
    reached = np.zeros(n, dtype=bool)
    while frontier:
        u = frontier.pop()
        for v in net.out_neighbors(u):
            if not reached[v]:
                reached[v] = True
                if partial[v] and not seen[v]:
                    seen[v] = True
                    frontier.append(v)
    return reached


def has_stubborn_path(net: InfluenceNetwork, src: int, dst: int) -> bool:
    """True iff a directed src->dst path exists whose interior is partially stubborn.

    A direct edge counts (empty interior).  ``src == dst`` asks whether any
    simple cycle through the node has an all-partially-stubborn interior;
    answered by reachability, so it never hits the enumeration budget.
    """
    if src == dst:
        partial_hops = [v for v in net.out_neighbors(src) if net.a[v] > 0.0 and v != src]
        if not partial_hops:
            return False
        reached = _reachable_through_partial(net, partial_hops)
        for v in partial_hops:
            reached[v] = True
        # need some partially stubborn u on the reach set with an edge back
        return any(
            reached[u] and net.a[u] > 0.0 and net.C[u, src] > 0.0 for u in range(net.n)
        )
    if net.C[src, dst] > 0.0:
        return True
    mids = [v for v in net.out_neighbors(src) if net.a[v] > 0.0 and v != dst]
    if not mids:
        return False
    reached = _reachable_through_partial(net, mids)
    for v in mids:
        reached[v] = True
    return any(
        reached[u] and net.a[u] > 0.0 and net.C[u, dst] > 0.0 for u in range(net.n) if u != dst
    )


# ---------------------------------------------------------------------------
# seeded generators for property tests and sweeps
# ---------------------------------------------------------------------------

def random_network(
    rng: np.random.Generator,
    n: int,
    fully_stubborn_prob: float = 0.2,
    a_range: tuple[float, float] = (0.0, 0.95),
    density: float = 1.0,
) -> InfluenceNetwork:
    """Random valid network: row-normalized nonnegative C, zero diagonal.

    Susceptibilities are uniform in ``a_range`` with each node independently
    forced fully stubborn with probability ``fully_stubborn_prob``; at least
    one node is kept partially stubborn.
    """
    while True:
        M = rng.uniform(0.0, 1.0, size=(n, n))
        if density < 1.0:
            M *= rng.uniform(0.0, 1.0, size=(n, n)) < density
        np.fill_diagonal(M, 0.0)
        sums = M.sum(axis=1)
        if np.all(sums > 1e-9):
            break
    C = M / M.sum(axis=1)[:, None]
    a = rng.uniform(a_range[0], a_range[1], size=n)
    a[rng.uniform(size=n) < fully_stubborn_prob] = 0.0
    if np.all(a == 0.0):
        a[int(rng.integers(n))] = rng.uniform(max(a_range[0], 0.05), a_range[1])
    return InfluenceNetwork(C=C, a=a)


def random_star_network(
    rng: np.random.Generator,
    n: int,
    center_fully_stubborn: bool = True,
    leaf_fully_stubborn_prob: float = 0.25,
    a_range: tuple[float, float] = (0.05, 0.9),
) -> InfluenceNetwork:
    """Random star: every leaf points only at the center (node 0).

    The center row spreads random positive weight over the leaves.  With
    ``center_fully_stubborn`` False the center gets a susceptibility drawn
    from ``a_range`` and its out-weights go only to fully stubborn leaves
    (at least one leaf is forced fully stubborn in that case).
    """
    C = np.zeros((n, n))
    C[1:, 0] = 1.0
    a = np.empty(n)
    leaves = np.arange(1, n)
    for i in leaves:
        if rng.uniform() < leaf_fully_stubborn_prob:
            a[i] = 0.0
        else:
            a[i] = rng.uniform(*a_range)
    if center_fully_stubborn:
        a[0] = 0.0
        if np.all(a[1:] == 0.0):
            a[int(rng.integers(1, n))] = rng.uniform(*a_range)
        w = rng.uniform(0.1, 1.0, size=n - 1)
        C[0, 1:] = w / w.sum()
    else:
        a[0] = rng.uniform(*a_range)
        stubborn_leaves = [i for i in leaves if a[i] == 0.0]
        if not stubborn_leaves:
            k = int(rng.integers(1, n))
            a[k] = 0.0
            stubborn_leaves = [k]
        w = rng.uniform(0.1, 1.0, size=len(stubborn_leaves))
        C[0, stubborn_leaves] = w / w.sum()
    return InfluenceNetwork(C=C, a=a)


def random_doubly_stochastic_ring(rng: np.random.Generator, n: int) -> np.ndarray:
    """Zero-diagonal doubly stochastic matrix: mixture of cyclic shifts."""
    w = rng.uniform(0.1, 1.0, size=n - 1)
    w = w / w.sum()
    C = np.zeros((n, n))
    for k in range(1, n):
        C += w[k - 1] * np.roll(np.eye(n), k, axis=1)
    return C
