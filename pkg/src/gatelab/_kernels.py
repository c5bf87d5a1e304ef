"""Compiled inner loop for the fixed-step integrator.

The Hamiltonian arrives as one flat coordinate list over all modulated
terms; entry e contributes ``exp(i * freqs[term[e]] * t) * vals[e]`` at
(rows[e], cols[e]).  Static parts ride along as a term with frequency 0.
Everything is complex128 and deterministic.
"""

import numba
import numpy as np


@numba.njit(cache=True, fastmath=False)
def _apply(rows, cols, vals, term, phases, y, out):
    """out = -i * H(t) @ y with per-term carrier phases precomputed."""
    d = y.shape[0]
    m = y.shape[1]
    for i in range(d):
        for j in range(m):
            out[i, j] = 0.0
    for e in range(rows.shape[0]):
        v = phases[term[e]] * vals[e]
        r = rows[e]
        c = cols[e]
        for j in range(m):
            out[r, j] += v * y[c, j]


@numba.njit(cache=True, fastmath=False)
def _phases_at(freqs, t, out):
    for k in range(freqs.shape[0]):
        out[k] = -1j * np.exp(1j * freqs[k] * t)


@numba.njit(cache=True, fastmath=False)
def rk4_flat(rows, cols, vals, term, freqs, y, t0, h, nsteps):
    """Advance i dy/dt = H(t) y by `nsteps` classic RK4 steps of size `h`.

    `y` has shape (dim, ncols); columns evolve independently.  Returns the
    advanced array (the input is not modified).
    """
    d = y.shape[0]
    m = y.shape[1]
    nt = freqs.shape[0]
    y = y.copy()
    k1 = np.empty((d, m), dtype=np.complex128)
    k2 = np.empty((d, m), dtype=np.complex128)
    k3 = np.empty((d, m), dtype=np.complex128)
    k4 = np.empty((d, m), dtype=np.complex128)
    tmp = np.empty((d, m), dtype=np.complex128)
    ph0 = np.empty(nt, dtype=np.complex128)
    phm = np.empty(nt, dtype=np.complex128)
    phe = np.empty(nt, dtype=np.complex128)
    for s in range(nsteps):
        t = t0 + s * h
        _phases_at(freqs, t, ph0)
        _phases_at(freqs, t + 0.5 * h, phm)
        _phases_at(freqs, t + h, phe)
        _apply(rows, cols, vals, term, ph0, y, k1)
        for i in range(d):
            for j in range(m):
                tmp[i, j] = y[i, j] + (0.5 * h) * k1[i, j]
        _apply(rows, cols, vals, term, phm, tmp, k2)
        for i in range(d):
            for j in range(m):
                tmp[i, j] = y[i, j] + (0.5 * h) * k2[i, j]
        _apply(rows, cols, vals, term, phm, tmp, k3)
        for i in range(d):
            for j in range(m):
                tmp[i, j] = y[i, j] + h * k3[i, j]
        _apply(rows, cols, vals, term, phe, tmp, k4)
        for i in range(d):
            for j in range(m):
                y[i, j] += (h / 6.0) * (
                    k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j]
                )
    return y
