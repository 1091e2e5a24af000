"""Investment-based defense law.

Investing z_i at node i divides its vulnerability by (gamma * z_i + 1) **
theta, so money has diminishing returns and z = 0 changes nothing. The
closed-form "break-even" investment level for a single node,
z* = (v ** (1/theta) - 1) / gamma, is where the sensitivity expression
below changes sign; for v <= 1 the raw value is non-positive and the
clamped version returns 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log

import numpy as np

from .errors import NotTwoNodeError, OutOfRangeError
from .network import DefenseParams, Network, Stage, VulnState

_FEASIBILITY_SLACK = 1e-9


@dataclass(frozen=True)
class Allocation:
    """Non-negative per-node investment amounts."""

    z: np.ndarray = field()

    def __post_init__(self):
        arr = np.asarray(self.z, dtype=np.float64).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise OutOfRangeError("allocation must be a non-empty 1-D vector")
        if not np.all(np.isfinite(arr)):
            raise OutOfRangeError("allocation contains non-finite values")
        if arr.min() < -1e-12:
            raise OutOfRangeError(f"allocation has negative entries: {arr.min()!r}")
        np.clip(arr, 0.0, None, out=arr)
        arr.setflags(write=False)
        object.__setattr__(self, "z", arr)

    @property
    def spent(self) -> float:
        return float(self.z.sum())

    def feasible(self, budget: float) -> bool:
        return self.spent <= budget + _FEASIBILITY_SLACK

    def __len__(self) -> int:
        return self.z.size


def _as_amounts(z, n: int) -> np.ndarray:
    """Accept an Allocation or a plain vector of per-node amounts.

    Plain vectors skip the non-negativity check so callers like
    finite-difference probes and root finders can evaluate slightly outside
    the feasible box.
    """
    arr = z.z if isinstance(z, Allocation) else np.asarray(z, dtype=np.float64)
    if arr.shape != (n,):
        raise OutOfRangeError(f"expected {n} investment amounts, got shape {arr.shape}")
    return arr


def apply_investment(state: VulnState, z, params: DefenseParams) -> VulnState:
    """Divide each node's vulnerability by (gamma * z_i + 1) ** theta.

    Accepts default or propagated vectors (the two pipeline positions where
    investment is applied) and returns an invested vector.
    """
    if state.stage not in (Stage.DEFAULT, Stage.PROPAGATED):
        raise OutOfRangeError(
            f"investment applies to default or propagated vectors, got {state.stage}"
        )
    amounts = _as_amounts(z, len(state))
    mitigation = np.power(params.gamma * amounts + 1.0, params.theta)
    if np.any(mitigation <= 0.0):
        raise OutOfRangeError("investment drove gamma * z + 1 non-positive")
    return VulnState(Stage.INVESTED, state.values / mitigation)


def _two_node_alphas(net: Network) -> tuple[float, float]:
    if net.n != 2:
        raise NotTwoNodeError(f"expected a two-node network, got {net.n} nodes")
    try:
        a01 = net.alpha[(0, 1)]
        a10 = net.alpha[(1, 0)]
    except KeyError as exc:
        raise NotTwoNodeError("both directed edges must exist") from exc
    return a01, a10


def sensitivity_dv_dz(net: Network, z, params: DefenseParams, i: int) -> float:
    """Two-node sensitivity of node i's final vulnerability to its own
    investment, up to a positive parameter-dependent proportionality.

    Only the sign and the zero crossing of this expression are meaningful;
    the magnitude is not calibrated against the numerical pipeline. With
    a_i = ln(v_i) - theta * ln(gamma * z_i + 1) for the swept node and b the
    same quantity for the other node, the value is

        a_i * theta * gamma * k / ((1 + a_i * k')^2 * (gamma * z_i + 1))

    where k' = b * (a_fwd - 1) * (a_rev - 1) and
    k = k' * (b * a_fwd * (a_rev - 1) - a_rev), with a_fwd the factor on the
    edge leaving node i and a_rev the factor on the edge entering it. The
    leading factor vanishes exactly at the closed-form investment level
    optimal_z_raw(v_i, params). Plain vectors may carry negative amounts so
    the zero crossing (which sits below zero for v < 1) can be located.
    """
    a01, a10 = _two_node_alphas(net)
    amounts = _as_amounts(z, 2)
    if i not in (0, 1):
        raise OutOfRangeError(f"node index must be 0 or 1, got {i!r}")
    v = net.default_vuln
    if i == 0:
        v_own, z_own, v_oth, z_oth = v[0], amounts[0], v[1], amounts[1]
        fwd, rev = a01, a10
    else:
        v_own, z_own, v_oth, z_oth = v[1], amounts[1], v[0], amounts[0]
        fwd, rev = a10, a01
    own_m = params.gamma * z_own + 1.0
    oth_m = params.gamma * z_oth + 1.0
    if own_m <= 0.0 or oth_m <= 0.0:
        raise OutOfRangeError("gamma * z + 1 must stay positive")
    if v_own <= 0.0 or v_oth <= 0.0:
        raise OutOfRangeError("default vulnerabilities must be positive here")
    a_own = log(v_own) - params.theta * log(own_m)
    b = log(v_oth) - params.theta * log(oth_m)
    k_prime = b * (fwd - 1.0) * (rev - 1.0)
    k = k_prime * (b * fwd * (rev - 1.0) - rev)
    return a_own * params.theta * k * params.gamma / ((1.0 + a_own * k_prime) ** 2 * own_m)


def optimal_z_raw(v: float, params: DefenseParams) -> float:
    """Unclamped break-even investment (v ** (1/theta) - 1) / gamma.

    Strictly increasing in v; non-positive whenever v <= 1.
    """
    if not 0.0 <= v <= 1.0:
        raise OutOfRangeError(f"v must lie in [0, 1], got {v!r}")
    return (v ** (1.0 / params.theta) - 1.0) / params.gamma


def optimal_z_closed_form(v: float, params: DefenseParams) -> float:
    """Clamped break-even investment max(0, optimal_z_raw)."""
    return max(0.0, optimal_z_raw(v, params))
