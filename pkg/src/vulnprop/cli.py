"""Command-line interface.

Subcommands: gen (write a canned topology file), propagate (print the
equilibrium vulnerabilities), optimize (print the best allocation), and
sweep (write a result CSV for a parameter grid). Machine-readable CSV goes
to stdout or --out; human commentary goes to stderr.

Exit codes: 0 success, 1 validation or usage error, 2 solver
non-convergence (including optimizations or sweep rows that failed to
converge).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import NoConvergenceError, VulnPropError
from .netfile import (
    load_network,
    render_result_csv,
    result_csv_header,
    save_network,
    write_network_file,
)
from .network import DefenseParams, generate_topology
from .optimizer import Model, OptimizeConfig, optimize
from .propagation import SolveMethod, SolverConfig, StepMode, solve_equilibrium
from .sweep import (
    AlphaAll,
    AlphaRatioR,
    BudgetW,
    NodeVuln,
    SweepSpec,
    run_sweep,
)

_fmt = "{:.9g}".format


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 means non-convergence
    # here, so route usage problems through the validation path instead
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="vulnprop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a canned topology as a network file")
    gen.add_argument("kind", help="dense5 | sparse5 | star:N | ring:N | utility | substation")
    gen.add_argument("--v", type=float, default=0.5, help="default vulnerability")
    gen.add_argument("--alpha", type=float, default=0.5, help="propagation factor")
    gen.add_argument("--gamma", type=float, default=0.7)
    gen.add_argument("--theta", type=float, default=2.0)
    gen.add_argument("--W", type=float, default=1.0, help="investment budget")
    gen.add_argument("--out", help="output path (default: stdout)")

    def solver_flags(p):
        p.add_argument("--mode", choices=["exact", "linearized"], default="exact")

    prop = sub.add_parser("propagate", help="print equilibrium vulnerabilities as CSV")
    prop.add_argument("file")
    solver_flags(prop)
    prop.add_argument("--method", choices=["newton", "fixed-point"], default="newton")
    prop.add_argument("--tol", type=float, default=1e-9)
    prop.add_argument("--max-iter", type=int, default=200)

    opt = sub.add_parser("optimize", help="print the optimal allocation as CSV")
    opt.add_argument("file")
    solver_flags(opt)
    opt.add_argument("--model", choices=["simple", "twostage"], default="simple")
    opt.add_argument("--W", type=float, help="override the file's budget")
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--restarts", type=int, default=16)

    swp = sub.add_parser("sweep", help="re-optimize across a parameter grid")
    swp.add_argument("file")
    solver_flags(swp)
    swp.add_argument("--model", choices=["simple", "twostage"], default="simple")
    swp.add_argument("--target", required=True,
                     help="node_vuln:IDX | budget_w | alpha_ratio_r | alpha_all")
    swp.add_argument("--grid", required=True, help="START:STOP:STEP, inclusive")
    swp.add_argument("--W", type=float, help="override the file's budget")
    swp.add_argument("--seed", type=int, default=0)
    swp.add_argument("--restarts", type=int, default=16)
    swp.add_argument("--out", help="output CSV path (default: stdout)")

    return parser


def _parse_target(text: str):
    name, _, arg = text.partition(":")
    if name == "node_vuln":
        try:
            return NodeVuln(int(arg))
        except ValueError:
            raise _UsageError("node_vuln needs an index, e.g. node_vuln:0")
    if arg:
        raise _UsageError(f"target {name!r} takes no argument")
    if name == "budget_w":
        return BudgetW()
    if name == "alpha_ratio_r":
        return AlphaRatioR()
    if name == "alpha_all":
        return AlphaAll()
    raise _UsageError(f"unknown sweep target {text!r}")


def _parse_grid(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise _UsageError("grid must be START:STOP:STEP")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise _UsageError("grid bounds must be numbers")
    if step <= 0 or stop < start:
        raise _UsageError("grid needs STOP >= START and STEP > 0")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + k * step for k in range(count))


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _mode(args) -> StepMode:
    return StepMode.EXACT if args.mode == "exact" else StepMode.LINEARIZED


def _cmd_gen(args) -> int:
    net = generate_topology(args.kind, args.v, args.alpha)
    params = DefenseParams(gamma=args.gamma, theta=args.theta, budget_W=args.W)
    if args.out:
        save_network(args.out, net, params)
        print(f"wrote {net.n} nodes, {len(net.edges)} edges to {args.out}",
              file=sys.stderr)
    else:
        sys.stdout.write(write_network_file(net, params))
    return 0


def _cmd_propagate(args) -> int:
    net, _ = load_network(args.file)
    cfg = SolverConfig(
        tol=args.tol,
        max_iter=args.max_iter,
        mode=_mode(args),
        method=SolveMethod.NEWTON if args.method == "newton"
        else SolveMethod.FIXED_POINT,
    )
    state, iters = solve_equilibrium(net, net.default_state(), cfg)
    lines = ["node,label,vulnerability"]
    for node, value in zip(net.nodes, state.values):
        lines.append(f"{node.index},{node.label},{_fmt(value)}")
    sys.stdout.write("\n".join(lines) + "\n")
    print(f"converged in {iters} iterations", file=sys.stderr)
    return 0


def _optimize_config(args) -> OptimizeConfig:
    return OptimizeConfig(
        model=Model.SIMPLE if args.model == "simple" else Model.TWO_STAGE,
        mode=_mode(args),
        restarts=args.restarts,
        seed=args.seed,
    )


def _cmd_optimize(args) -> int:
    net, params = load_network(args.file)
    if args.W is not None:
        params = DefenseParams(params.gamma, params.theta, args.W)
    result = optimize(net, params, _optimize_config(args))
    header = result_csv_header(net.n)[1:]  # no param_value for a single run
    cells = [_fmt(z) for z in result.allocation.z]
    cells += [_fmt(result.objective), _fmt(result.allocation.spent),
              "true" if result.converged else "false"]
    sys.stdout.write(",".join(header) + "\n" + ",".join(cells) + "\n")
    print(
        f"objective {result.objective:.6g} spending "
        f"{result.allocation.spent:.6g} of {params.budget_W:.6g}",
        file=sys.stderr,
    )
    return 0 if result.converged else 2


def _cmd_sweep(args) -> int:
    net, params = load_network(args.file)
    if args.W is not None:
        params = DefenseParams(params.gamma, params.theta, args.W)
    spec = SweepSpec(
        target=_parse_target(args.target),
        grid=_parse_grid(args.grid),
        base_net=net,
        base_params=params,
        opt_cfg=_optimize_config(args),
    )
    result = run_sweep(spec)
    _emit(render_result_csv(result), args.out)
    bad = [row for row in result.rows if row.error is not None or not row.converged]
    for row in result.rows:
        if row.error is not None:
            print(f"row {row.param_value:g} failed: {row.error}", file=sys.stderr)
    print(f"{len(result.rows)} rows, {len(bad)} flagged", file=sys.stderr)
    return 2 if bad else 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "gen": _cmd_gen,
            "propagate": _cmd_propagate,
            "optimize": _cmd_optimize,
            "sweep": _cmd_sweep,
        }[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NoConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VulnPropError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
