"""Budget-constrained investment optimization.

The objective is the sum of final vulnerabilities after the modeled
pipeline runs, minimized over allocations with z >= 0 and sum(z) <= W.
Because investment strictly helps (each extra unit divides some node's
vulnerability by a larger factor), optima spend the whole budget; the
solver still treats the budget as an inequality and reports what was spent.

Two pipeline models exist. SIMPLE propagates the defaults to steady state,
invests, and scores the invested vector. TWO_STAGE additionally re-solves
the steady state after investment and scores that. Either can run on the
exact or the linearized propagation step.

optimize() is multi-start projected gradient descent with central
finite-difference gradients; grid_search_oracle() is the brute-force
cross-check for networks of up to three nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .defense import Allocation, apply_investment
from .errors import NoConvergenceError, OutOfRangeError, TooManyNodesError
from .network import DefenseParams, Network, VulnState
from .propagation import SolveMethod, SolverConfig, StepMode, solve_equilibrium

# Relative half-width of finite-difference probes: h_i = FD_SCALE * max(1, |z_i|).
FD_SCALE = 1e-6


class Model(Enum):
    SIMPLE = "simple"
    TWO_STAGE = "twostage"


@dataclass(frozen=True)
class OptimizeConfig:
    model: Model = Model.SIMPLE
    mode: StepMode = StepMode.EXACT
    restarts: int = 16
    step_tol: float = 1e-6
    obj_tol: float = 1e-8
    max_outer_iter: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise OutOfRangeError(f"restarts must be >= 1, got {self.restarts!r}")
        if self.step_tol <= 0.0 or self.obj_tol <= 0.0:
            raise OutOfRangeError("tolerances must be positive")
        if self.max_outer_iter < 1:
            raise OutOfRangeError("max_outer_iter must be >= 1")


@dataclass(eq=False)
class OptimizeResult:
    allocation: Allocation
    objective: float
    per_node_final_vuln: VulnState
    converged: bool
    restarts_used: int


def _solver_for(mode: StepMode) -> SolverConfig:
    return SolverConfig(mode=mode, method=SolveMethod.NEWTON)


def evaluate_pipeline(
    net: Network,
    z,
    params: DefenseParams,
    model: Model = Model.SIMPLE,
    mode: StepMode = StepMode.EXACT,
) -> tuple[float, VulnState]:
    """Run the modeled pipeline at allocation z.

    Returns (objective, final state) where the objective is the sum of the
    final per-node vulnerabilities. z may be an Allocation or a plain
    vector; plain vectors are how finite-difference probes evaluate just
    outside the feasible box.
    """
    solver = _solver_for(mode)
    propagated, _ = solve_equilibrium(net, net.default_state(), solver)
    invested = apply_investment(propagated, z, params)
    if model is Model.SIMPLE:
        return float(invested.values.sum()), invested
    final, _ = solve_equilibrium(net, invested, solver)
    return float(final.values.sum()), final


def pipeline_gradient(
    net: Network,
    z,
    params: DefenseParams,
    model: Model = Model.SIMPLE,
    mode: StepMode = StepMode.EXACT,
    scale: float = FD_SCALE,
) -> np.ndarray:
    """Central finite-difference gradient of the pipeline objective."""
    zv = np.asarray(z.z if isinstance(z, Allocation) else z, dtype=np.float64).copy()
    grad = np.empty(zv.size)
    for i in range(zv.size):
        h = scale * max(1.0, abs(zv[i]))
        orig = zv[i]
        zv[i] = orig + h
        hi, _ = evaluate_pipeline(net, zv, params, model, mode)
        zv[i] = orig - h
        lo, _ = evaluate_pipeline(net, zv, params, model, mode)
        zv[i] = orig
        grad[i] = (hi - lo) / (2.0 * h)
    return grad


def project_budget(z, budget: float) -> np.ndarray:
    """Euclidean projection onto {z >= 0, sum(z) <= budget}.

    Clipping negatives suffices when the clipped point fits the budget;
    otherwise the result lies on the simplex sum(z) = budget and is found
    by the sort-and-threshold rule.
    """
    v = np.asarray(z, dtype=np.float64)
    if budget <= 0.0:
        return np.zeros(v.size)
    clipped = np.clip(v, 0.0, None)
    if clipped.sum() <= budget:
        return clipped
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - budget
    ks = np.arange(1, v.size + 1)
    valid = u - css / ks > 0.0
    rho = int(np.nonzero(valid)[0][-1])
    tau = css[rho] / (rho + 1.0)
    return np.clip(v - tau, 0.0, None)


def _pgd(objective, gradient, z0, budget, cfg: OptimizeConfig):
    """Projected gradient descent from one start; returns (z, f, converged)."""
    z = project_budget(z0, budget)
    f = objective(z)
    for _ in range(cfg.max_outer_iter):
        g = gradient(z)
        pg_norm = float(np.max(np.abs(z - project_budget(z - g, budget))))
        if pg_norm <= cfg.step_tol:
            return z, f, True
        step = 1.0
        improved = False
        for _ in range(30):
            candidate = project_budget(z - step * g, budget)
            fc = objective(candidate)
            if fc < f:
                z, f = candidate, fc
                improved = True
                break
            step *= 0.5
        if not improved:
            # flat to line-search precision; report whether the projected
            # gradient already meets tolerance
            return z, f, pg_norm <= cfg.step_tol
    g = gradient(z)
    pg_norm = float(np.max(np.abs(z - project_budget(z - g, budget))))
    return z, f, pg_norm <= cfg.step_tol


def optimize(net: Network, params: DefenseParams, cfg: OptimizeConfig | None = None) -> OptimizeResult:
    """Minimize the pipeline objective over feasible allocations.

    Runs cfg.restarts random feasible starts plus the uniform allocation
    W/n and keeps the best outcome; ties on the objective break toward the
    lexicographically smallest allocation, so merging is order-independent
    and results are deterministic for a given seed.
    """
    cfg = cfg or OptimizeConfig()
    n = net.n
    budget = params.budget_W

    def objective(zv: np.ndarray) -> float:
        value, _ = evaluate_pipeline(net, zv, params, cfg.model, cfg.mode)
        return value

    def gradient(zv: np.ndarray) -> np.ndarray:
        return pipeline_gradient(net, zv, params, cfg.model, cfg.mode)

    if budget <= 0.0:
        z = np.zeros(n)
        value, state = evaluate_pipeline(net, z, params, cfg.model, cfg.mode)
        return OptimizeResult(Allocation(z), value, state, True, 0)

    rng = np.random.default_rng(cfg.seed)
    starts = [np.full(n, budget / n)]
    for _ in range(cfg.restarts):
        weights = rng.uniform(size=n)
        weights /= weights.sum()
        starts.append(weights * (budget * rng.uniform()))

    best = None
    for start in starts:
        try:
            z, f, ok = _pgd(objective, gradient, start, budget, cfg)
        except NoConvergenceError:
            continue
        key = (f, tuple(z))
        if best is None or key < best[0]:
            best = (key, z, ok)

    if best is None:
        # every start died inside the equilibrium solver; report the
        # feasible do-nothing allocation instead of raising
        z = np.zeros(n)
        value, state = evaluate_pipeline(net, z, params, cfg.model, cfg.mode)
        return OptimizeResult(Allocation(z), value, state, False, cfg.restarts)

    _, z_best, ok_best = best
    value, state = evaluate_pipeline(net, z_best, params, cfg.model, cfg.mode)
    return OptimizeResult(Allocation(z_best), value, state, ok_best, cfg.restarts)


def _axis(budget: float, resolution: float) -> np.ndarray:
    steps = int(np.floor(budget / resolution + 1e-9))
    values = np.arange(steps + 1) * resolution
    if values[-1] < budget - 1e-12:
        values = np.append(values, budget)
    return values


def grid_search_oracle(
    net: Network,
    params: DefenseParams,
    cfg: OptimizeConfig | None = None,
    resolution: float = 1e-3,
) -> OptimizeResult:
    """Exhaustive grid search over allocations spending the whole budget.

    The objective is non-increasing in every z_i (investment never hurts),
    so some optimum always lies on the face sum(z) = W; searching that face
    is equivalent to searching the full simplex at equal resolution and
    keeps the point count polynomial in 1/resolution. Only networks with at
    most three nodes are accepted. Candidates are enumerated in
    lexicographic order and ties keep the first (smallest) allocation.
    """
    cfg = cfg or OptimizeConfig()
    if net.n > 3:
        raise TooManyNodesError(
            f"grid search handles at most 3 nodes, got {net.n}"
        )
    if resolution <= 0.0:
        raise OutOfRangeError(f"resolution must be positive, got {resolution!r}")
    budget = params.budget_W
    n = net.n

    if n == 1:
        candidates = np.array([[budget]])
    elif n == 2:
        axis = _axis(budget, resolution)
        candidates = np.column_stack([axis, budget - axis])
    else:
        rows = []
        for z1 in _axis(budget, resolution):
            for z2 in _axis(budget - z1, resolution):
                rows.append((z1, z2, budget - z1 - z2))
        candidates = np.array(rows)
    np.clip(candidates, 0.0, None, out=candidates)

    if cfg.model is Model.SIMPLE:
        # investment is the last pipeline stage, so the propagated vector is
        # shared by every candidate and the scan is pure arithmetic
        propagated, _ = solve_equilibrium(net, net.default_state(), _solver_for(cfg.mode))
        mitigation = np.power(params.gamma * candidates + 1.0, params.theta)
        values = (propagated.values / mitigation).sum(axis=1)
    else:
        values = np.array(
            [
                evaluate_pipeline(net, zs, params, cfg.model, cfg.mode)[0]
                for zs in candidates
            ]
        )

    winner = int(np.argmin(values))
    z = candidates[winner]
    value, state = evaluate_pipeline(net, z, params, cfg.model, cfg.mode)
    return OptimizeResult(Allocation(z), value, state, True, 0)
