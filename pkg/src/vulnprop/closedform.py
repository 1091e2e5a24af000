"""Closed-form two-node objectives for the linearized model.

For two nodes the linearized steady state can be written down directly.
With B_i = ln of the vector being propagated, the equilibrium solves

    f_1 = 1 + B_1 * (f_2 * a21 + 1 - f_2)
    f_2 = 1 + B_2 * (f_1 * a12 + 1 - f_1)

whose solution sums to

    [2 + B_1*(a21 + B_2*(a21 - 1)) + B_2*(a12 + B_1*(a12 - 1))]
    / [1 - B_1*B_2*(a12 - 1)*(a21 - 1)]

where a12 is the factor on edge 0 -> 1 and a21 on edge 1 -> 0. The two
objectives differ only in what gets propagated:

  * objective_simple invests on the default vulnerabilities and propagates
    once: B_i = ln(v_i) - theta * ln(gamma * z_i + 1).
  * objective_two_stage first propagates the defaults to their steady state
    (which for two nodes is k_i / k below), invests on that, and propagates
    again: B_i = ln(k_i / k) - theta * ln(gamma * z_i + 1).

Both match the numerical linearized pipeline to solver tolerance wherever
the linearization keeps every intermediate value inside (0, 1); outside
that region the pipeline clamps and the algebra does not.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .errors import DegenerateDenominatorError, OutOfRangeError

_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class TwoNodeParams:
    """Inputs of the two-node closed forms.

    alpha12 is the propagation factor on the edge from node 1 to node 2
    (indices 0 -> 1), alpha21 the reverse. r = alpha12 / alpha21 is the
    asymmetry ratio swept in sensitivity studies.
    """

    v1: float
    v2: float
    alpha12: float
    alpha21: float
    gamma: float = 0.7
    theta: float = 2.0

    def __post_init__(self):
        for name in ("v1", "v2", "alpha12", "alpha21"):
            val = getattr(self, name)
            if not np.isfinite(val) or not 0.0 <= val <= 1.0:
                raise OutOfRangeError(f"{name} must lie in [0, 1], got {val!r}")
        if self.v1 <= 0.0 or self.v2 <= 0.0:
            raise OutOfRangeError("default vulnerabilities must be positive")
        if self.gamma <= 0.0:
            raise OutOfRangeError(f"gamma must be positive, got {self.gamma!r}")
        if self.theta < 1.0:
            raise OutOfRangeError(f"theta must be >= 1, got {self.theta!r}")

    @property
    def r(self) -> float:
        if self.alpha21 == 0.0:
            raise OutOfRangeError("r is undefined when alpha21 = 0")
        return self.alpha12 / self.alpha21


def _investment_term(p: TwoNodeParams, z: float) -> float:
    m = p.gamma * z + 1.0
    if m <= 0.0:
        raise OutOfRangeError("gamma * z + 1 must stay positive")
    return p.theta * log(m)


def _equilibrium_sum(b1: float, b2: float, a12: float, a21: float) -> float:
    den = 1.0 - b1 * b2 * (a12 - 1.0) * (a21 - 1.0)
    if abs(den) < _DEGENERATE_TOL:
        raise DegenerateDenominatorError(den)
    num = 2.0 + b1 * (a21 + b2 * (a21 - 1.0)) + b2 * (a12 + b1 * (a12 - 1.0))
    return num / den


def objective_simple(p: TwoNodeParams, z1: float, z2: float) -> float:
    """Sum of final vulnerabilities when investment hits the defaults and a
    single propagation stage runs to steady state."""
    b1 = log(p.v1) - _investment_term(p, z1)
    b2 = log(p.v2) - _investment_term(p, z2)
    return _equilibrium_sum(b1, b2, p.alpha12, p.alpha21)


def objective_two_stage(p: TwoNodeParams, z1: float, z2: float) -> float:
    """Sum of final vulnerabilities for the full propagate, invest,
    propagate-again pipeline.

    k_i / k is the first-stage linearized steady state of node i; it must
    stay positive for the second-stage logarithm to exist.
    """
    l1, l2 = log(p.v1), log(p.v2)
    cross = (p.alpha21 - 1.0) * (p.alpha12 - 1.0) * l1 * l2
    k = 1.0 - cross
    if abs(k) < _DEGENERATE_TOL:
        raise DegenerateDenominatorError(k)
    k1 = 1.0 + l1 * p.alpha21 + (p.alpha21 - 1.0) * l1 * l2
    k2 = 1.0 + l2 * p.alpha12 + (p.alpha12 - 1.0) * l1 * l2
    s1, s2 = k1 / k, k2 / k
    if s1 <= 0.0 or s2 <= 0.0:
        raise OutOfRangeError(
            "first-stage steady state left (0, 1]; the linearized closed form "
            f"does not apply (values {s1!r}, {s2!r})"
        )
    b1 = log(s1) - _investment_term(p, z1)
    b2 = log(s2) - _investment_term(p, z2)
    return _equilibrium_sum(b1, b2, p.alpha12, p.alpha21)
