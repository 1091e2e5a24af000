"""Shared fixtures and independent reference implementations.

The ref_* helpers recompute the model with plain Python loops, deliberately
sharing no code with the package kernels, so oracle comparisons cannot
inherit a kernel bug. two_node_lin_equilibrium solves the 2x2 linear system
of the linearized steady state directly with numpy.

The acceptance module reports one line per criterion; the terminal-summary
hook below prints those lines after the run so they survive output capture.
"""

from __future__ import annotations

import math

import numpy as np

from vulnprop import Network, build_network

# (criterion number -> (passed, detail)); filled by tests/test_acceptance.py
ACCEPTANCE_REPORTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_REPORTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_REPORTS):
        passed, detail = ACCEPTANCE_REPORTS[num]
        verdict = "PASS" if passed else "FAIL"
        line = f"[criterion {num}] {verdict}"
        if detail:
            line += f" - {detail}"
        terminalreporter.write_line(line)


def ref_exponent(net: Network, x, i: int) -> float:
    e = 1.0
    for j in net.in_sources(i):
        a = net.alpha[(j, i)]
        e *= x[j] * a + 1.0 - x[j]
    return e


def ref_exact_sweep(net: Network, base, x) -> np.ndarray:
    return np.array(
        [base[i] ** ref_exponent(net, x, i) for i in range(net.n)]
    )


def ref_linearized_sweep(net: Network, base, x, clamp: bool = True) -> np.ndarray:
    out = np.array(
        [
            1.0 + ref_exponent(net, x, i) * math.log(max(base[i], 1e-12))
            for i in range(net.n)
        ]
    )
    return np.clip(out, 0.0, 1.0) if clamp else out


def random_network(
    rng: np.random.Generator,
    n: int | None = None,
    edge_prob: float = 0.6,
    v_range: tuple[float, float] = (0.05, 0.95),
    a_range: tuple[float, float] = (0.05, 0.95),
) -> Network:
    """Random directed network; each direction of each pair tossed separately."""
    if n is None:
        n = int(rng.integers(2, 11))
    nodes = [(f"n{i}", float(rng.uniform(*v_range))) for i in range(n)]
    edges = [
        (i, j, float(rng.uniform(*a_range)))
        for i in range(n)
        for j in range(n)
        if i != j and rng.uniform() < edge_prob
    ]
    return build_network(nodes, edges)


def two_node_lin_equilibrium(b1: float, b2: float, a12: float, a21: float) -> np.ndarray:
    """Unclamped linearized steady state of a two-node network, solved as a
    2x2 linear system; b_i is the log of node i's propagated base."""
    lhs = np.array([[1.0, -b1 * (a21 - 1.0)], [-b2 * (a12 - 1.0), 1.0]])
    rhs = np.array([1.0 + b1, 1.0 + b2])
    return np.linalg.solve(lhs, rhs)


def symmetric_two_node(v: float = 0.5, alpha: float = 0.5) -> Network:
    return build_network(
        [("a_1", v), ("a_2", v)], [(0, 1, alpha), (1, 0, alpha)]
    )
