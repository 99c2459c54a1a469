"""NumPy implementations of the hot loops; used when the compiled module is unavailable."""

import numpy as np


def duhamel_accumulate(S, omega2, tau, W):
    """Row ``j`` of the result is ``sum_k W[j, k] exp(-(tau[j] - tau[k]) omega2) S[k]``.

    ``omega2`` must be ascending.
    """
    m = len(tau)
    out = np.zeros((m, len(omega2)), dtype=np.complex128)
    for j in range(m):
        ks = np.nonzero(W[j, : j + 1])[0]
        if ks.size == 0:
            continue
        decay = np.exp(-np.outer(tau[j] - tau[ks], omega2))
        out[j] = (W[j, ks, None] * decay * S[ks]).sum(axis=0)
    return out


def fd_explicit_advance(u, h, dx, dt, nsteps, left, right, upwind):
    """Advance ``u_t = u_xx - h u u_x`` by ``nsteps`` explicit steps, in place.

    Ghost values ``left``/``right`` pin the Dirichlet boundaries.
    """
    r = dt / (dx * dx)
    n = u.shape[0]
    ext = np.empty(n + 2)
    ext[0] = left
    ext[-1] = right
    for _ in range(nsteps):
        ext[1:-1] = u
        ul = ext[:-2]
        ur = ext[2:]
        a = h * u
        diff = r * (ur - 2.0 * u + ul)
        if upwind:
            grad = np.where(a > 0, u - ul, ur - u)
            adv = (dt / dx) * a * grad
        else:
            adv = (0.5 * dt / dx) * a * (ur - ul)
        u += diff - adv
    return u
