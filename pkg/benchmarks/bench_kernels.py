"""Compare the compiled propagation kernels against the pure-Python mirror.

Runs the two hot paths (fixed-point equilibrium iteration and Newton system
assembly) on ring topologies of growing size and reports the median wall
time per call for whichever backends are importable.

Usage: python3 benchmarks/bench_kernels.py [--sizes 50,200,800] [--repeats 9]
"""

from __future__ import annotations

import argparse
import importlib
import statistics
import time

import numpy as np

from vulnprop import generate_topology
from vulnprop._kernels import MODE_EXACT


def _backends():
    found = {}
    for name in ("_native", "_pure"):
        try:
            found[name.lstrip("_")] = importlib.import_module(
                f"vulnprop._kernels.{name}"
            )
        except ImportError:
            pass
    return found


def _time_call(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="50,200,800",
                    help="comma-separated node counts")
    ap.add_argument("--repeats", type=int, default=9)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = _backends()
    if not backends:
        print("no kernel backend importable; build the package first")
        return 1

    print(f"backends: {', '.join(backends)}")
    header = f"{'workload':<28}{'n':>6}" + "".join(
        f"{name:>14}" for name in backends
    )
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)

    for n in sizes:
        net = generate_topology(f"ring:{n}", 0.5, 0.5)
        indptr, indices, alphas = net.in_csr()
        base = net.default_vuln
        logbase = np.log(base)
        x0 = base.copy()

        workloads = {
            "fixed_point tol=1e-10": lambda mod: mod.fixed_point(
                MODE_EXACT, indptr, indices, alphas, base, logbase,
                x0, 1e-10, 500,
            ),
            "newton_system assembly": lambda mod: mod.newton_system(
                MODE_EXACT, indptr, indices, alphas, base, logbase, x0,
            ),
        }
        for label, call in workloads.items():
            times = {
                name: _time_call(lambda m=mod: call(m), args.repeats)
                for name, mod in backends.items()
            }
            row = f"{label:<28}{n:>6}"
            for name in backends:
                row += f"{times[name] * 1e3:>12.3f}ms"
            if len(times) == 2:
                native, pure = times.get("native"), times.get("pure")
                row += f"{pure / native:>9.1f}x"
            print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
