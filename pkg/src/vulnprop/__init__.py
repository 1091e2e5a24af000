"""Vulnerability propagation and defense-investment optimization.

Model a communication network whose nodes carry default vulnerabilities,
propagate those vulnerabilities along directed edges to a steady state,
mitigate them with per-node security investment, and optimize how a fixed
budget is split across nodes. See the README for the model walkthrough,
file formats, and CLI usage.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .closedform import TwoNodeParams, objective_simple, objective_two_stage
from .defense import (
    Allocation,
    apply_investment,
    optimal_z_closed_form,
    optimal_z_raw,
    sensitivity_dv_dz,
)
from .errors import (
    DanglingIndexError,
    DegenerateDenominatorError,
    DuplicateEdgeError,
    NoConvergenceError,
    NotTwoNodeError,
    OutOfRangeError,
    ParseError,
    SchemaVersionError,
    SelfLoopError,
    SingularJacobianWarning,
    TooFewRowsError,
    TooManyNodesError,
    VulnPropError,
)
from .netfile import (
    load_network,
    parse_csv_table,
    parse_network_file,
    parse_result_csv,
    render_result_csv,
    save_network,
    write_network_file,
)
from .network import (
    DefenseParams,
    Edge,
    Network,
    Node,
    Stage,
    VulnState,
    build_network,
    generate_topology,
    neighbors_in,
)
from .optimizer import (
    Model,
    OptimizeConfig,
    OptimizeResult,
    evaluate_pipeline,
    grid_search_oracle,
    optimize,
    pipeline_gradient,
    project_budget,
)
from .propagation import (
    SolveMethod,
    SolverConfig,
    StepMode,
    jacobian_paper,
    propagate_exact_step,
    propagate_linearized_step,
    solve_equilibrium,
)
from .sweep import (
    AlphaAll,
    AlphaRatioR,
    BudgetW,
    NodeVuln,
    SweepResult,
    SweepRow,
    SweepSpec,
    Trend,
    run_sweep,
    trend_check,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    # network
    "Node", "Edge", "Network", "DefenseParams", "Stage", "VulnState",
    "build_network", "generate_topology", "neighbors_in",
    # propagation
    "StepMode", "SolveMethod", "SolverConfig",
    "propagate_exact_step", "propagate_linearized_step",
    "solve_equilibrium", "jacobian_paper",
    # defense
    "Allocation", "apply_investment", "sensitivity_dv_dz",
    "optimal_z_raw", "optimal_z_closed_form",
    # closed form
    "TwoNodeParams", "objective_simple", "objective_two_stage",
    # optimizer
    "Model", "OptimizeConfig", "OptimizeResult", "evaluate_pipeline",
    "pipeline_gradient", "project_budget", "optimize", "grid_search_oracle",
    # sweep
    "NodeVuln", "BudgetW", "AlphaRatioR", "AlphaAll", "SweepSpec",
    "SweepRow", "SweepResult", "Trend", "run_sweep", "trend_check",
    # io
    "parse_network_file", "write_network_file", "load_network",
    "save_network", "render_result_csv", "parse_result_csv",
    "parse_csv_table",
    # errors
    "VulnPropError", "OutOfRangeError", "SelfLoopError", "DuplicateEdgeError",
    "DanglingIndexError", "NotTwoNodeError", "DegenerateDenominatorError",
    "NoConvergenceError", "TooManyNodesError", "TooFewRowsError",
    "ParseError", "SchemaVersionError", "SingularJacobianWarning",
]
