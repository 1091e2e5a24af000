"""Parameter sweeps over repeated optimizations.

A sweep varies one scalar knob over a grid, re-optimizes the allocation at
every grid value with the same optimizer seed (so rows are comparable), and
records one row per value. Row-level solver failures flag the row and the
sweep continues. trend_check summarizes a column against the swept value
with a Spearman rank correlation, which is the right tool for "goes up" /
"goes down" claims that should not depend on exact magnitudes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Union

import numpy as np
from scipy import stats

from .errors import (
    NotTwoNodeError,
    OutOfRangeError,
    TooFewRowsError,
    VulnPropError,
)
from .network import DefenseParams, Network
from .optimizer import OptimizeConfig, optimize


@dataclass(frozen=True)
class NodeVuln:
    """Sweep the default vulnerability of one node."""

    index: int


@dataclass(frozen=True)
class BudgetW:
    """Sweep the total investment budget."""


@dataclass(frozen=True)
class AlphaRatioR:
    """Two-node only: set alpha(0 -> 1) = r * alpha(1 -> 0), holding the
    reverse factor fixed. Grid values r with r * alpha(1 -> 0) > 1 cannot
    be applied and flag their rows."""


@dataclass(frozen=True)
class AlphaAll:
    """Sweep every edge's propagation factor together."""


SweepTarget = Union[NodeVuln, BudgetW, AlphaRatioR, AlphaAll]


class Trend(Enum):
    NON_DECREASING = "non-decreasing"
    NON_INCREASING = "non-increasing"


@dataclass(frozen=True)
class SweepSpec:
    target: SweepTarget
    grid: tuple[float, ...]
    base_net: Network
    base_params: DefenseParams
    opt_cfg: OptimizeConfig = field(default_factory=OptimizeConfig)

    def __post_init__(self):
        grid = tuple(float(v) for v in self.grid)
        object.__setattr__(self, "grid", grid)
        if not grid:
            raise OutOfRangeError("sweep grid must be non-empty")
        if any(not np.isfinite(v) for v in grid):
            raise OutOfRangeError("sweep grid contains non-finite values")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise OutOfRangeError("sweep grid must be strictly increasing")
        t = self.target
        if isinstance(t, NodeVuln):
            if not 0 <= t.index < self.base_net.n:
                raise OutOfRangeError(f"swept node {t.index} does not exist")
            if grid[0] < 0.0 or grid[-1] > 1.0:
                raise OutOfRangeError("node vulnerabilities must lie in [0, 1]")
        elif isinstance(t, AlphaAll):
            if grid[0] < 0.0 or grid[-1] > 1.0:
                raise OutOfRangeError("propagation factors must lie in [0, 1]")
        elif isinstance(t, BudgetW):
            if grid[0] < 0.0:
                raise OutOfRangeError("budgets must be non-negative")
        elif isinstance(t, AlphaRatioR):
            if grid[0] <= 0.0:
                raise OutOfRangeError("ratio values must be positive")
            if self.base_net.n != 2 or (1, 0) not in self.base_net.alpha \
                    or (0, 1) not in self.base_net.alpha:
                raise NotTwoNodeError(
                    "ratio sweeps need a two-node network with both edges"
                )
        else:
            raise OutOfRangeError(f"unknown sweep target {t!r}")


@dataclass(frozen=True)
class SweepRow:
    param_value: float
    z: tuple[float, ...]
    objective: float
    spent: float
    converged: bool
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    spec: SweepSpec
    seed: int
    created: str  # ISO timestamp; metadata only, never serialized into CSV


def _apply_target(spec: SweepSpec, value: float) -> tuple[Network, DefenseParams]:
    net, params = spec.base_net, spec.base_params
    t = spec.target
    if isinstance(t, NodeVuln):
        return net.with_default_vuln(t.index, value), params
    if isinstance(t, BudgetW):
        return net, replace(params, budget_W=value)
    if isinstance(t, AlphaAll):
        return net.with_all_alpha(value), params
    # AlphaRatioR; validity of r * alpha depends on the base network, so it
    # is checked per row rather than at spec construction
    rev = net.alpha[(1, 0)]
    return net.with_alpha(0, 1, value * rev), params


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Optimize once per grid value; failed rows are flagged, not fatal."""
    n = spec.base_net.n
    rows = []
    for value in spec.grid:
        try:
            net, params = _apply_target(spec, value)
            res = optimize(net, params, spec.opt_cfg)
            rows.append(
                SweepRow(
                    param_value=value,
                    z=tuple(res.allocation.z.tolist()),
                    objective=res.objective,
                    spent=res.allocation.spent,
                    converged=res.converged,
                )
            )
        except VulnPropError as exc:
            rows.append(
                SweepRow(
                    param_value=value,
                    z=(math.nan,) * n,
                    objective=math.nan,
                    spent=math.nan,
                    converged=False,
                    error=str(exc),
                )
            )
    return SweepResult(
        rows=tuple(rows),
        spec=spec,
        seed=spec.opt_cfg.seed,
        created=datetime.now(timezone.utc).isoformat(),
    )


ColumnSelector = Union[str, int, Callable[[SweepRow], float]]


def _column(rows: list[SweepRow], column: ColumnSelector) -> np.ndarray:
    if column == "objective":
        return np.array([r.objective for r in rows])
    if column == "spent":
        return np.array([r.spent for r in rows])
    if isinstance(column, int):
        return np.array([r.z[column] for r in rows])
    if callable(column):
        return np.array([column(r) for r in rows])
    raise OutOfRangeError(f"unknown column selector {column!r}")


def trend_check(
    result: SweepResult,
    column: ColumnSelector,
    direction: Trend,
    rho_min: float = 0.9,
) -> bool:
    """Spearman-based monotonicity check of a column against the grid.

    column is "objective", "spent", an integer z index, or a callable
    mapping a row to a float. Rows flagged with an error are excluded; at
    least three usable rows are required. A constant column has no rank
    correlation and counts as rho = 0, which fails any rho_min > 0.
    """
    if not 0.0 < rho_min <= 1.0:
        raise OutOfRangeError(f"rho_min must lie in (0, 1], got {rho_min!r}")
    rows = [r for r in result.rows if r.error is None]
    if len(rows) < 3:
        raise TooFewRowsError(
            f"trend check needs at least 3 usable rows, got {len(rows)}"
        )
    x = np.array([r.param_value for r in rows])
    y = _column(rows, column)
    if not np.all(np.isfinite(y)):
        raise TooFewRowsError("trend column contains non-finite values")
    with warnings.catch_warnings():
        # a constant column is a legitimate input here; it maps to rho = 0
        warnings.simplefilter("ignore", stats.ConstantInputWarning)
        rho = stats.spearmanr(x, y).statistic
    if math.isnan(rho):  # constant column
        rho = 0.0
    if direction is Trend.NON_DECREASING:
        return rho >= rho_min
    return rho <= -rho_min
