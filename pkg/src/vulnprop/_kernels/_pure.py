"""Pure-Python propagation kernels.

These mirror the compiled module ``vulnprop._kernels._native`` function for
function; the package selects whichever is importable (see __init__). All
kernels consume the in-edge CSR layout produced by Network.in_csr():
``indices[indptr[i]:indptr[i+1]]`` are the sources feeding node i and
``alphas`` the matching propagation factors.

``base`` is the vector being propagated (the exponent base in exact mode),
``logbase`` its floored natural log, and ``x`` the evaluation point of the
current sweep.
"""

import numpy as np

MODE_EXACT = 0
MODE_LINEARIZED = 1


def exponents(indptr, indices, alphas, x):
    """Per-node exponent: product of (x_j * a + 1 - x_j) over incoming edges.

    Nodes without incoming edges get exponent 1 (an empty product), which is
    also the value a fully inert neighborhood produces.
    """
    n = indptr.shape[0] - 1
    out = np.ones(n)
    if indices.shape[0]:
        xs = x[indices]
        factors = xs * alphas + 1.0 - xs
        for i in range(n):
            lo, hi = indptr[i], indptr[i + 1]
            if hi > lo:
                out[i] = factors[lo:hi].prod()
    return out


def sweep(mode, indptr, indices, alphas, base, logbase, x, clamp=True):
    """One synchronous update of every node, evaluated at x."""
    e = exponents(indptr, indices, alphas, x)
    if mode == MODE_EXACT:
        return np.power(base, e)
    out = 1.0 + e * logbase
    if clamp:
        np.clip(out, 0.0, 1.0, out=out)
    return out


def fixed_point(mode, indptr, indices, alphas, base, logbase, x0, tol,
                max_iter, damping=1.0, clamp=True):
    """Iterate the sweep map until the sup-norm residual is within tol.

    Returns (x, sweeps, converged). The returned x is the last iterate whose
    residual sweep(x) - x was actually evaluated, so converged certifies the
    residual bound at x itself. damping blends each update as
    x + damping * (sweep(x) - x).
    """
    x = np.array(x0, dtype=np.float64)
    for it in range(1, max_iter + 1):
        fx = sweep(mode, indptr, indices, alphas, base, logbase, x, clamp)
        if np.max(np.abs(fx - x)) <= tol:
            return x, it, True
        if damping == 1.0:
            x = fx
        else:
            x = x + damping * (fx - x)
    return x, max_iter, False


def newton_system(mode, indptr, indices, alphas, base, logbase, x):
    """Residual g(x) = x - sweep(x) and its dense Jacobian at x.

    The diagonal is exactly 1 because self-loops are rejected at build time,
    so no node feeds its own exponent. In linearized mode a row whose raw
    update falls outside [0, 1] is clamped and treated as locally constant:
    its off-diagonal entries are zero.
    """
    n = indptr.shape[0] - 1
    g = np.empty(n)
    jac = np.eye(n)
    for i in range(n):
        lo, hi = indptr[i], indptr[i + 1]
        src = indices[lo:hi]
        xs = x[src]
        f = xs * alphas[lo:hi] + 1.0 - xs
        e = f.prod() if hi > lo else 1.0
        if mode == MODE_EXACT:
            s = base[i] ** e
            dcoef = s * logbase[i]
            g[i] = x[i] - s
        else:
            raw = 1.0 + e * logbase[i]
            g[i] = x[i] - min(1.0, max(0.0, raw))
            dcoef = logbase[i] if 0.0 <= raw <= 1.0 else 0.0
        if hi > lo and dcoef != 0.0:
            deg = hi - lo
            pre = np.ones(deg + 1)
            np.cumprod(f, out=pre[1:])
            suf = np.ones(deg + 1)
            suf[:deg] = np.cumprod(f[::-1])[::-1]
            leave_one_out = pre[:deg] * suf[1:]
            jac[i, src] = -dcoef * (alphas[lo:hi] - 1.0) * leave_one_out
    return g, jac
