"""Vulnerability propagation over a network.

One synchronous sweep updates every node i from the current vector x:

    exact       v_i' = base_i ** E_i(x)
    linearized  v_i' = 1 + E_i(x) * ln(base_i), clamped to [0, 1]

where E_i(x) is the product of (x_j * alpha_ji + 1 - x_j) over nodes j with
an edge into i. E_i lies in [0, 1] whenever x does, so the exact update can
only raise a vulnerability (base ** E >= base when base <= 1). The
linearized form is the first-order expansion of base ** E around E = 0 and
is only trustworthy while its output stays inside [0, 1].

solve_equilibrium finds a fixed point of the chosen sweep, i.e. the
steady-state vector v' with v_i' = base_i ** E_i(v'). The base vector (the
state being propagated) also serves as the starting iterate. In exact mode
the sweep map is monotone, so plain fixed-point iteration converges
monotonically from below; Newton iteration is the faster default and falls
back to damped fixed-point if its Jacobian degenerates.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import NoConvergenceError, OutOfRangeError, SingularJacobianWarning
from .network import Network, Stage, VulnState

# Floor applied before taking logs; also the smallest base the linearized
# form will see. Keeps 0 ** 0 = 1 semantics intact in exact mode because the
# floor only feeds logarithms, never the pow call.
LOG_FLOOR = 1e-12


class StepMode(Enum):
    EXACT = "exact"
    LINEARIZED = "linearized"


class SolveMethod(Enum):
    FIXED_POINT = "fixed-point"
    NEWTON = "newton"
    # Literal zero-diagonal Jacobian variant, kept only for comparison.
    NEWTON_PAPER_JACOBIAN = "newton-paper-jacobian"


@dataclass(frozen=True)
class SolverConfig:
    """Equilibrium solver settings.

    tol bounds the sup-norm residual of the returned vector; max_iter caps
    residual evaluations; newton_damping is the backtracking factor applied
    when a Newton step fails to reduce the residual.
    """

    tol: float = 1e-9
    max_iter: int = 200
    mode: StepMode = StepMode.EXACT
    method: SolveMethod = SolveMethod.NEWTON
    newton_damping: float = 0.5

    def __post_init__(self):
        if not np.isfinite(self.tol) or self.tol <= 0.0:
            raise OutOfRangeError(f"tol must be positive, got {self.tol!r}")
        if self.max_iter < 1:
            raise OutOfRangeError(f"max_iter must be >= 1, got {self.max_iter!r}")
        if not 0.0 < self.newton_damping < 1.0:
            raise OutOfRangeError(
                f"newton_damping must lie in (0, 1), got {self.newton_damping!r}"
            )


_NEXT_STAGE = {Stage.DEFAULT: Stage.PROPAGATED, Stage.INVESTED: Stage.EQUILIBRIUM}


def _require_propagatable(state: VulnState):
    if state.stage not in _NEXT_STAGE:
        raise OutOfRangeError(
            f"can only propagate default or invested vectors, got {state.stage}"
        )


def _check_size(net: Network, state: VulnState):
    if len(state) != net.n:
        raise OutOfRangeError(
            f"state has {len(state)} entries for a network of {net.n} nodes"
        )


def _prepared(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    base = np.ascontiguousarray(values, dtype=np.float64)
    logbase = np.log(np.clip(base, LOG_FLOOR, 1.0))
    return base, logbase


def propagate_exact_step(net: Network, state: VulnState) -> VulnState:
    """One exact synchronous sweep of the whole network."""
    _require_propagatable(state)
    _check_size(net, state)
    base, logbase = _prepared(state.values)
    out = _kernels.sweep(_kernels.MODE_EXACT, *net.in_csr(), base, logbase, base)
    return VulnState(_NEXT_STAGE[state.stage], out)


def propagate_linearized_step(net: Network, state: VulnState) -> VulnState:
    """One linearized sweep; output clamped into [0, 1]."""
    _require_propagatable(state)
    _check_size(net, state)
    base, logbase = _prepared(state.values)
    out = _kernels.sweep(
        _kernels.MODE_LINEARIZED, *net.in_csr(), base, logbase, base, True
    )
    return VulnState(_NEXT_STAGE[state.stage], out)


def solve_equilibrium(
    net: Network, v0: VulnState, cfg: SolverConfig | None = None
) -> tuple[VulnState, int]:
    """Solve for the propagation steady state of base vector v0.

    Returns (state, iterations) where iterations counts residual
    evaluations (sweeps for fixed-point, system builds for Newton). The
    returned state satisfies ||x - sweep(x)||_inf <= cfg.tol.

    Raises NoConvergenceError if the iteration cap is hit. A singular or
    stalling Newton system is not an error: the solver warns with
    SingularJacobianWarning and finishes the job with damped fixed-point
    iteration (given a 10x iteration budget since damping halves progress).
    """
    cfg = cfg or SolverConfig()
    _require_propagatable(v0)
    _check_size(net, v0)
    mode = _kernels.MODE_EXACT if cfg.mode is StepMode.EXACT else _kernels.MODE_LINEARIZED
    csr = net.in_csr()
    base, logbase = _prepared(v0.values)

    if cfg.method is SolveMethod.FIXED_POINT:
        x, iters, ok = _kernels.fixed_point(
            mode, *csr, base, logbase, base, cfg.tol, cfg.max_iter
        )
        if not ok:
            residual = _residual_norm(mode, csr, base, logbase, x)
            raise NoConvergenceError(iters, residual)
    elif cfg.method is SolveMethod.NEWTON:
        x, iters = _newton(mode, csr, base, logbase, cfg, _derived_system)
    else:
        x, iters = _newton(mode, csr, base, logbase, cfg, _paper_system(net))

    return VulnState(_NEXT_STAGE[v0.stage], np.clip(x, 0.0, 1.0)), iters


def _residual_norm(mode, csr, base, logbase, x) -> float:
    fx = _kernels.sweep(mode, *csr, base, logbase, x, True)
    return float(np.max(np.abs(fx - x)))


def _derived_system(mode, csr, base, logbase, x, net):
    return _kernels.newton_system(mode, *csr, base, logbase, x)


def _paper_system(net: Network):
    def build(mode, csr, base, logbase, x, _net):
        fx = _kernels.sweep(mode, *csr, base, logbase, x, True)
        return x - fx, _paper_matrix(net, x)

    return build


def _newton(mode, csr, base, logbase, cfg: SolverConfig, system) -> tuple[np.ndarray, int]:
    x = base.copy()
    iters = 0
    fall_back = False
    residual = np.inf
    for _ in range(cfg.max_iter):
        iters += 1
        g, jac = system(mode, csr, base, logbase, x, None)
        residual = float(np.max(np.abs(g)))
        if residual <= cfg.tol:
            return x, iters
        try:
            step = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            fall_back = True
            break
        if not np.all(np.isfinite(step)):
            fall_back = True
            break
        scale = 1.0
        for _ in range(60):
            candidate = np.clip(x + scale * step, 0.0, 1.0)
            if _residual_norm(mode, csr, base, logbase, candidate) < residual:
                x = candidate
                break
            scale *= cfg.newton_damping
        else:
            fall_back = True
            break
    else:
        raise NoConvergenceError(iters, residual)

    if fall_back:
        warnings.warn(
            "Newton step unusable (singular Jacobian or no descent); "
            "finishing with damped fixed-point iteration",
            SingularJacobianWarning,
            stacklevel=3,
        )
        x, extra, ok = _kernels.fixed_point(
            mode, *csr, base, logbase, x, cfg.tol, cfg.max_iter * 10, 0.5
        )
        if not ok:
            raise NoConvergenceError(
                iters + extra, _residual_norm(mode, csr, base, logbase, x)
            )
        return x, iters + extra
    raise AssertionError("unreachable")


def jacobian_paper(net: Network, v: VulnState) -> np.ndarray:
    """Zero-diagonal combinatorial Jacobian variant.

    Entry (i, j) exists where node j feeds node i and equals one plus the
    sum, over every non-empty subset K of i's other in-neighbors, of the
    product of v_k * (alpha_ki - 1) for k in K. Equivalent to the
    leave-one-out exponent product, but built by literal subset enumeration,
    which costs O(2^degree) per entry. Kept for comparison against the
    derived unit-diagonal Jacobian; not used by the default solver.
    """
    if net.n < 2:
        raise OutOfRangeError("the combinatorial Jacobian needs at least two nodes")
    _check_size(net, v)
    x = v.values
    alpha = net.alpha
    out = np.zeros((net.n, net.n))
    for i in range(net.n):
        sources = net.in_sources(i)
        for j in sources:
            others = [k for k in sources if k != j]
            total = 1.0
            for size in range(1, len(others) + 1):
                for subset in itertools.combinations(others, size):
                    term = 1.0
                    for k in subset:
                        term *= x[k] * (alpha[(k, i)] - 1.0)
                    total += term
            out[i, j] = total
    return out


def _paper_matrix(net: Network, x: np.ndarray) -> np.ndarray:
    return jacobian_paper(net, VulnState(Stage.DEFAULT, np.clip(x, 0.0, 1.0)))
