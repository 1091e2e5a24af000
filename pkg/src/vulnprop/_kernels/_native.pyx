"""Compiled propagation kernels.

Same contract as vulnprop._kernels._pure; see that module for the CSR
layout and argument conventions. The hot loops here are plain C loops over
the CSR arrays so equilibrium solving stays cheap inside optimizer and
sweep workloads.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()

MODE_EXACT = 0
MODE_LINEARIZED = 1


cdef inline double _clip01(double v) nogil:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


cdef void _sweep_into(int mode,
                      const cnp.int32_t[::1] indptr,
                      const cnp.int32_t[::1] indices,
                      const double[::1] alphas,
                      const double[::1] base,
                      const double[::1] logbase,
                      const double[::1] x,
                      bint clamp,
                      double[::1] out) nogil:
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef double e, xj, val
    for i in range(n):
        e = 1.0
        for k in range(indptr[i], indptr[i + 1]):
            xj = x[indices[k]]
            e *= xj * alphas[k] + 1.0 - xj
        if mode == 0:
            val = pow(base[i], e)
        else:
            val = 1.0 + e * logbase[i]
            if clamp:
                val = _clip01(val)
        out[i] = val


def exponents(const cnp.int32_t[::1] indptr,
              const cnp.int32_t[::1] indices,
              const double[::1] alphas,
              const double[::1] x):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.ones(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i, k
    cdef double e, xj
    for i in range(n):
        e = 1.0
        for k in range(indptr[i], indptr[i + 1]):
            xj = x[indices[k]]
            e *= xj * alphas[k] + 1.0 - xj
        o[i] = e
    return out


def sweep(int mode,
          const cnp.int32_t[::1] indptr,
          const cnp.int32_t[::1] indices,
          const double[::1] alphas,
          const double[::1] base,
          const double[::1] logbase,
          const double[::1] x,
          bint clamp=True):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.empty(n)
    cdef double[::1] o = out
    _sweep_into(mode, indptr, indices, alphas, base, logbase, x, clamp, o)
    return out


def fixed_point(int mode,
                const cnp.int32_t[::1] indptr,
                const cnp.int32_t[::1] indices,
                const double[::1] alphas,
                const double[::1] base,
                const double[::1] logbase,
                x0,
                double tol,
                int max_iter,
                double damping=1.0,
                bint clamp=True):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    x_arr = np.array(x0, dtype=np.float64)
    fx_arr = np.empty(n)
    cdef double[::1] x = x_arr
    cdef double[::1] fx = fx_arr
    cdef Py_ssize_t i
    cdef int it
    cdef double diff, d
    for it in range(1, max_iter + 1):
        with nogil:
            _sweep_into(mode, indptr, indices, alphas, base, logbase, x, clamp, fx)
            diff = 0.0
            for i in range(n):
                d = fabs(fx[i] - x[i])
                if d > diff:
                    diff = d
        if diff <= tol:
            return x_arr, it, True
        with nogil:
            if damping == 1.0:
                for i in range(n):
                    x[i] = fx[i]
            else:
                for i in range(n):
                    x[i] = x[i] + damping * (fx[i] - x[i])
    return x_arr, max_iter, False


def newton_system(int mode,
                  const cnp.int32_t[::1] indptr,
                  const cnp.int32_t[::1] indices,
                  const double[::1] alphas,
                  const double[::1] base,
                  const double[::1] logbase,
                  const double[::1] x):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t nnz = indices.shape[0]
    g_arr = np.empty(n)
    jac_arr = np.zeros((n, n))
    pre_arr = np.empty(nnz + 1)
    suf_arr = np.empty(nnz + 1)
    cdef double[::1] g = g_arr
    cdef double[:, ::1] jac = jac_arr
    cdef double[::1] pre = pre_arr
    cdef double[::1] suf = suf_arr
    cdef Py_ssize_t i, k, lo, hi, deg, t
    cdef double e, xj, f, s, raw, dcoef
    with nogil:
        for i in range(n):
            lo = indptr[i]
            hi = indptr[i + 1]
            deg = hi - lo
            # prefix/suffix products give leave-one-out exponents without
            # dividing by possibly zero factors
            pre[0] = 1.0
            for t in range(deg):
                xj = x[indices[lo + t]]
                f = xj * alphas[lo + t] + 1.0 - xj
                pre[t + 1] = pre[t] * f
            suf[deg] = 1.0
            for t in range(deg - 1, -1, -1):
                xj = x[indices[lo + t]]
                f = xj * alphas[lo + t] + 1.0 - xj
                suf[t] = f * suf[t + 1]
            e = pre[deg]
            if mode == 0:
                s = pow(base[i], e)
                dcoef = s * logbase[i]
                g[i] = x[i] - s
            else:
                raw = 1.0 + e * logbase[i]
                g[i] = x[i] - _clip01(raw)
                if 0.0 <= raw <= 1.0:
                    dcoef = logbase[i]
                else:
                    dcoef = 0.0
            jac[i, i] = 1.0
            if dcoef != 0.0:
                for t in range(deg):
                    jac[i, indices[lo + t]] = (
                        -dcoef * (alphas[lo + t] - 1.0) * pre[t] * suf[t + 1]
                    )
    return g_arr, jac_arr
