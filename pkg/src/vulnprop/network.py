"""Network domain model.

A network is a directed graph of nodes that each carry a default
vulnerability (the probability the node can be compromised on its own).
Every directed edge (j -> i) carries a propagation factor alpha in [0, 1]
describing how strongly a compromised j degrades i: alpha = 0 means j's
vulnerability propagates fully into i, alpha = 1 means the link is inert.
A missing edge behaves exactly like alpha = 1.

Networks are immutable; the clone helpers return modified copies so that
parameter sweeps never mutate shared state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DanglingIndexError,
    DuplicateEdgeError,
    OutOfRangeError,
    SelfLoopError,
)

# Tolerance applied when validating probabilities and factors; values this
# close to the boundary are snapped onto it rather than rejected.
_EDGE_TOL = 1e-12


def _checked_unit(value: float, what: str) -> float:
    v = float(value)
    if not np.isfinite(v) or v < -_EDGE_TOL or v > 1.0 + _EDGE_TOL:
        raise OutOfRangeError(f"{what} must lie in [0, 1], got {value!r}")
    return min(1.0, max(0.0, v))


@dataclass(frozen=True)
class Node:
    """A network node: positional index, human label, default vulnerability."""

    index: int
    label: str
    default_vuln: float


@dataclass(frozen=True)
class Edge:
    """Directed edge src -> dst with propagation factor alpha."""

    src: int
    dst: int
    alpha: float


@dataclass(frozen=True)
class DefenseParams:
    """Parameters of the investment-based defense law.

    gamma scales how effective each unit of investment is, theta sets the
    diminishing-returns exponent, and budget_W caps total spending.
    """

    gamma: float = 0.7
    theta: float = 2.0
    budget_W: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma <= 0.0:
            raise OutOfRangeError(f"gamma must be positive, got {self.gamma!r}")
        if not np.isfinite(self.theta) or self.theta < 1.0:
            raise OutOfRangeError(f"theta must be >= 1, got {self.theta!r}")
        if not np.isfinite(self.budget_W) or self.budget_W < 0.0:
            raise OutOfRangeError(
                f"budget_W must be non-negative, got {self.budget_W!r}"
            )


class Stage(Enum):
    """Pipeline position of a vulnerability vector."""

    DEFAULT = "default"
    PROPAGATED = "propagated"
    INVESTED = "invested"
    EQUILIBRIUM = "equilibrium"


class VulnState:
    """A per-node vulnerability vector tagged with its pipeline stage.

    Values are validated into [0, 1] on construction and stored read-only.
    """

    __slots__ = ("stage", "values")

    def __init__(self, stage: Stage, values):
        arr = np.asarray(values, dtype=np.float64).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise OutOfRangeError("vulnerability vector must be 1-D and non-empty")
        if not np.all(np.isfinite(arr)):
            raise OutOfRangeError("vulnerability vector contains non-finite values")
        if arr.min() < -_EDGE_TOL or arr.max() > 1.0 + _EDGE_TOL:
            raise OutOfRangeError(
                f"vulnerabilities must lie in [0, 1], got range "
                f"[{arr.min()!r}, {arr.max()!r}]"
            )
        np.clip(arr, 0.0, 1.0, out=arr)
        arr.setflags(write=False)
        object.__setattr__(self, "stage", stage)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("VulnState is immutable")

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"VulnState({self.stage.value}, {self.values.tolist()!r})"


@dataclass(frozen=True)
class Network:
    """Immutable directed network with per-edge propagation factors."""

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(node.label for node in self.nodes)

    @cached_property
    def alpha(self) -> dict[tuple[int, int], float]:
        """Sparse factor map {(src, dst): alpha}; absent pairs are inert."""
        return {(e.src, e.dst): e.alpha for e in self.edges}

    @cached_property
    def default_vuln(self) -> np.ndarray:
        arr = np.array([node.default_vuln for node in self.nodes], dtype=np.float64)
        arr.setflags(write=False)
        return arr

    def default_state(self) -> VulnState:
        return VulnState(Stage.DEFAULT, self.default_vuln)

    @cached_property
    def _in_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # In-edge CSR layout: for node i, indices/alphas[indptr[i]:indptr[i+1]]
        # hold the sources and factors of edges arriving at i, sources ascending.
        order = sorted(self.edges, key=lambda e: (e.dst, e.src))
        indptr = np.zeros(self.n + 1, dtype=np.int32)
        for e in order:
            indptr[e.dst + 1] += 1
        np.cumsum(indptr, out=indptr)
        indices = np.ascontiguousarray([e.src for e in order], dtype=np.int32)
        alphas = np.ascontiguousarray([e.alpha for e in order], dtype=np.float64)
        if indices.size == 0:
            indices = np.zeros(0, dtype=np.int32)
            alphas = np.zeros(0, dtype=np.float64)
        for arr in (indptr, indices, alphas):
            arr.setflags(write=False)
        return indptr, indices, alphas

    def in_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, sources, alphas) arrays describing incoming edges."""
        return self._in_csr

    def in_sources(self, i: int) -> list[int]:
        indptr, indices, _ = self._in_csr
        return indices[indptr[i]:indptr[i + 1]].tolist()

    # -- clone helpers used by sweeps ------------------------------------

    def with_default_vuln(self, index: int, value: float) -> Network:
        if not 0 <= index < self.n:
            raise DanglingIndexError(f"node index {index} out of range")
        v = _checked_unit(value, f"default vulnerability of node {index}")
        nodes = tuple(
            replace(node, default_vuln=v) if node.index == index else node
            for node in self.nodes
        )
        return Network(nodes, self.edges)

    def with_alpha(self, src: int, dst: int, value: float) -> Network:
        if (src, dst) not in self.alpha:
            raise DanglingIndexError(f"no edge {src} -> {dst} to modify")
        a = _checked_unit(value, f"alpha of edge {src} -> {dst}")
        edges = tuple(
            replace(e, alpha=a) if (e.src, e.dst) == (src, dst) else e
            for e in self.edges
        )
        return Network(self.nodes, edges)

    def with_all_alpha(self, value: float) -> Network:
        a = _checked_unit(value, "alpha")
        edges = tuple(replace(e, alpha=a) for e in self.edges)
        return Network(self.nodes, edges)


def build_network(
    nodes: Sequence[tuple[str, float]],
    edges: Iterable[tuple[int, int, float]] = (),
) -> Network:
    """Validate and assemble a Network.

    nodes: sequence of (label, default_vulnerability).
    edges: iterable of (src, dst, alpha) index triples.

    Raises OutOfRangeError, SelfLoopError, DuplicateEdgeError, or
    DanglingIndexError when the description is inconsistent.
    """
    if not nodes:
        raise OutOfRangeError("a network needs at least one node")
    labels = [str(label) for label, _ in nodes]
    if len(set(labels)) != len(labels):
        raise OutOfRangeError("node labels must be unique")
    if any(not label for label in labels):
        raise OutOfRangeError("node labels must be non-empty")
    built_nodes = tuple(
        Node(i, labels[i], _checked_unit(v, f"default vulnerability of {labels[i]!r}"))
        for i, (_, v) in enumerate(nodes)
    )

    n = len(built_nodes)
    seen: set[tuple[int, int]] = set()
    built_edges = []
    for src, dst, alpha in edges:
        src, dst = int(src), int(dst)
        if not (0 <= src < n and 0 <= dst < n):
            raise DanglingIndexError(f"edge ({src}, {dst}) references a missing node")
        if src == dst:
            raise SelfLoopError(f"self-loop on node {src} is not allowed")
        if (src, dst) in seen:
            raise DuplicateEdgeError(f"edge ({src}, {dst}) appears twice")
        seen.add((src, dst))
        built_edges.append(
            Edge(src, dst, _checked_unit(alpha, f"alpha of edge ({src}, {dst})"))
        )
    built_edges.sort(key=lambda e: (e.src, e.dst))
    return Network(built_nodes, tuple(built_edges))


def neighbors_in(net: Network, i: int) -> list[Node]:
    """Nodes with an edge into node i, ascending by index."""
    if not 0 <= i < net.n:
        raise DanglingIndexError(f"node index {i} out of range")
    return [net.nodes[j] for j in net.in_sources(i)]


def _undirected(pairs: Iterable[tuple[int, int]], alpha: float):
    for a, b in pairs:
        yield a, b, alpha
        yield b, a, alpha


def generate_topology(kind: str, v_default: float = 0.5, alpha_default: float = 0.5) -> Network:
    """Build one of the canned topologies.

    kind is one of "dense5", "sparse5", "star:N", "ring:N", "utility",
    "substation". Every generated edge is bidirectional with alpha set to
    alpha_default, and every node starts at v_default.

    "utility" and "substation" are deliberately small approximations of a
    utility control center (a firewall-router-switch-hosts chain with 19
    leaf substations hanging off the router) and of a three-level
    station/bay/process substation LAN whose six core devices each have
    degree at least two.
    """
    v = _checked_unit(v_default, "v_default")
    a = _checked_unit(alpha_default, "alpha_default")
    spec = kind.strip().lower()
    name, _, arg = spec.partition(":")

    if name == "dense5":
        nodes = [(f"a_{i}", v) for i in range(5)]
        pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    elif name == "sparse5":
        nodes = [(f"a_{i}", v) for i in range(5)]
        pairs = [(i, i + 1) for i in range(4)]
    elif name == "star":
        n = _topology_size(arg, minimum=2, what="star")
        nodes = [(f"a_{i}", v) for i in range(n)]
        pairs = [(0, i) for i in range(1, n)]
    elif name == "ring":
        n = _topology_size(arg, minimum=3, what="ring")
        nodes = [(f"a_{i}", v) for i in range(n)]
        pairs = [(i, (i + 1) % n) for i in range(n)]
    elif name == "utility":
        hosts = [f"host_{i}" for i in range(3)]
        subs = [f"sub_{i:02d}" for i in range(19)]
        names = ["firewall", "router", "switch", *hosts, *subs]
        nodes = [(label, v) for label in names]
        pairs = [(0, 1), (1, 2)]
        pairs += [(2, 3 + i) for i in range(len(hosts))]
        first_sub = 3 + len(hosts)
        pairs += [(1, first_sub + i) for i in range(len(subs))]
    elif name == "substation":
        names = [
            "station_switch", "router", "workstation",      # station level
            "relay_ctrl", "rtu", "bay_ctrl",                 # bay level
            "ct_0", "pt_0", "ct_1", "pt_1",                  # process level
            "breaker_0", "breaker_1",
        ]
        nodes = [(label, v) for label in names]
        pairs = [
            (0, 1), (0, 2), (0, 3),
            (1, 4), (2, 5),
            (3, 6), (3, 7), (4, 8), (4, 9), (5, 10), (5, 11),
        ]
    else:
        raise OutOfRangeError(f"unknown topology kind {kind!r}")

    if arg and name not in ("star", "ring"):
        raise OutOfRangeError(f"topology {name!r} takes no size argument")
    return build_network(nodes, _undirected(pairs, a))


def _topology_size(arg: str, minimum: int, what: str) -> int:
    try:
        n = int(arg)
    except ValueError:
        raise OutOfRangeError(f"{what} topology needs an integer size, e.g. {what}:5")
    if n < minimum:
        raise OutOfRangeError(f"{what} topology needs at least {minimum} nodes")
    return n
