"""Compiled coordinate-ascent loops.

Complex quantities are carried as separate real/imaginary float arrays so
the inner loops vectorise.  The phase of element i is held as the unit
rotation ``(cr[i], ci[i])``.
"""

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def _energy(sr, si):
    f = 0.0
    for m in range(sr.shape[0]):
        f += sr[m] * sr[m] + si[m] * si[m]
    return f


@numba.njit(cache=True, nogil=True)
def ascend(a0r, a0i, br, bi, cr, ci, tol, max_sweeps, sweep_trace, update_trace):
    """Maximise ``||a0 + sum_i rot_i b_i||^2`` over unit rotations in place.

    Each update sets ``rot_i = conj(c) / |c|`` with ``c = d_i^H b_i`` and
    ``d_i`` the sum without term i, the exact maximiser along that
    coordinate.  Each sweep ends with one block update that rotates all
    elements by a common phase, again to its exact maximiser.  Stops once a
    full sweep gains less than ``tol`` relative, or after ``max_sweeps``.
    ``sweep_trace[k]`` receives the objective after sweep k (index 0 is the
    start); ``update_trace`` (length ``max_sweeps * (n + 1) + 1``, or 0 to
    skip) receives it after every single update.

    Returns ``(f, sweeps)``.
    """
    n, m = br.shape
    sr = a0r.copy()
    si = a0i.copy()
    nb = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for k in range(m):
            sr[k] += cr[i] * br[i, k] - ci[i] * bi[i, k]
            si[k] += cr[i] * bi[i, k] + ci[i] * br[i, k]
            acc += br[i, k] * br[i, k] + bi[i, k] * bi[i, k]
        nb[i] = acc
    f = _energy(sr, si)
    record = update_trace.shape[0] > 0
    sweep_trace[0] = f
    if record:
        update_trace[0] = f
    sweeps = 0
    for sweep in range(max_sweeps):
        sweeps += 1
        for i in range(n):
            # c = s^H b_i - conj(rot_i) ||b_i||^2
            xr = 0.0
            xi = 0.0
            for k in range(m):
                xr += sr[k] * br[i, k] + si[k] * bi[i, k]
                xi += sr[k] * bi[i, k] - si[k] * br[i, k]
            xr -= cr[i] * nb[i]
            xi += ci[i] * nb[i]
            mag = np.hypot(xr, xi)
            if mag > 0.0:
                nr = xr / mag
                ni = -xi / mag
                dr = nr - cr[i]
                di = ni - ci[i]
                for k in range(m):
                    sr[k] += dr * br[i, k] - di * bi[i, k]
                    si[k] += dr * bi[i, k] + di * br[i, k]
                cr[i] = nr
                ci[i] = ni
            if record:
                update_trace[sweep * (n + 1) + i + 1] = _energy(sr, si)
        # block update: rotate all elements together so that the RIS sum
        # (s - a0) lines up with a0; this mode is slow under single updates
        # when a0 is small
        xr = 0.0
        xi = 0.0
        for k in range(m):
            dr = sr[k] - a0r[k]
            di = si[k] - a0i[k]
            xr += a0r[k] * dr + a0i[k] * di
            xi += a0r[k] * di - a0i[k] * dr
        mag = np.hypot(xr, xi)
        if mag > 0.0:
            # gain is 2 * (|c| - Re c); skip when it is below rounding
            if mag - xr > 1e-15 * mag:
                ur = xr / mag
                ui = -xi / mag
                for k in range(m):
                    dr = sr[k] - a0r[k]
                    di = si[k] - a0i[k]
                    sr[k] = a0r[k] + ur * dr - ui * di
                    si[k] = a0i[k] + ur * di + ui * dr
                for i in range(n):
                    tr = cr[i] * ur - ci[i] * ui
                    ci[i] = cr[i] * ui + ci[i] * ur
                    cr[i] = tr
        if record:
            update_trace[sweep * (n + 1) + n + 1] = _energy(sr, si)
        fn = _energy(sr, si)
        sweep_trace[sweeps] = fn
        gained = fn - f
        f = fn
        if gained <= tol * fn:
            break
    return f, sweeps


@numba.njit(cache=True, nogil=True)
def ascend_batch(a0r, a0i, br, bi, starts, tol, max_sweeps):
    """Best-of-restarts ascent for a batch of independent instances.

    ``starts`` has shape (T, R, N) and holds the initial phases of every
    restart.  Ties between restarts keep the earliest one.
    Returns ``(psi, f, sweeps)`` of the winning restarts.
    """
    t_count, r_count, n = starts.shape
    psi = np.zeros((t_count, n))
    best_f = np.full(t_count, -1.0)
    sweeps = np.zeros(t_count, dtype=np.int64)
    trace = np.zeros(max_sweeps + 1)
    no_updates = np.zeros(0)
    cr = np.zeros(n)
    ci = np.zeros(n)
    for t in range(t_count):
        for r in range(r_count):
            for i in range(n):
                cr[i] = np.cos(starts[t, r, i])
                ci[i] = np.sin(starts[t, r, i])
            f, used = ascend(a0r[t], a0i[t], br[t], bi[t], cr, ci, tol, max_sweeps,
                             trace, no_updates)
            if f > best_f[t]:
                best_f[t] = f
                sweeps[t] = used
                for i in range(n):
                    psi[t, i] = np.arctan2(ci[i], cr[i])
    return psi, best_f, sweeps
