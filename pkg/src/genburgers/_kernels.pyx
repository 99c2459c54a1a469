# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot loops in :mod:`genburgers._kernels_py`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin

cnp.import_array()


def duhamel_accumulate(double complex[:, ::1] S, const double[::1] omega2,
                       const double[::1] tau, const double[:, ::1] W):
    cdef Py_ssize_t m = tau.shape[0]
    cdef Py_ssize_t nw = omega2.shape[0]
    cdef Py_ssize_t j, k, i
    cdef double wjk, dt, f
    out_arr = np.zeros((m, nw), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    for j in range(m):
        # fixed k-order summation keeps results deterministic
        for k in range(j + 1):
            wjk = W[j, k]
            if wjk == 0.0:
                continue
            dt = tau[j] - tau[k]
            for i in range(nw):
                # omega2 ascends; past this point the factor underflows
                if dt * omega2[i] > 700.0:
                    break
                f = wjk * exp(-dt * omega2[i])
                out[j, i] = out[j, i] + f * S[k, i]
    return out_arr


def fd_explicit_advance(double[::1] u, const double[::1] h, double dx, double dt,
                        Py_ssize_t nsteps, double left, double right, bint upwind):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, step
    cdef double r = dt / (dx * dx)
    cdef double c = 0.5 * dt / dx
    cdef double cu = dt / dx
    cdef double ul, uc, ur, a, adv
    new_arr = np.empty(n)
    cdef double[::1] new = new_arr
    for step in range(nsteps):
        for i in range(n):
            uc = u[i]
            ul = u[i - 1] if i > 0 else left
            ur = u[i + 1] if i < n - 1 else right
            a = h[i] * uc
            if upwind:
                if a > 0:
                    adv = cu * a * (uc - ul)
                else:
                    adv = cu * a * (ur - uc)
            else:
                adv = c * a * (ur - ul)
            new[i] = uc + r * (ur - 2.0 * uc + ul) - adv
        u[:] = new
    return np.asarray(u)
