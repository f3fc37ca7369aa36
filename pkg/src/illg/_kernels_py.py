"""Pure-NumPy stepping kernels (fallback backend).

Each kernel runs the whole lagged-Laplacian fixed-point loop for one time
step on raw arrays (ghost layer included, ghost content ignored on input)
and returns

    (m_next_full, diffs, converged, max_len_dev)

where ``diffs`` holds the l2 norms of successive iterate differences.  The
per-cell linear system v - a x v = r is solved with the exact closed form
v = (r + a x r + (a.r) a) / (1 + |a|^2).
"""

from __future__ import annotations

import numpy as np


def _fill_ghosts(a: np.ndarray, dim: int) -> None:
    for ax in range(dim):
        lo = [slice(None)] * a.ndim
        hi = [slice(None)] * a.ndim
        lo[ax], hi[ax] = 0, 1
        a[tuple(lo)] = a[tuple(hi)]
        lo[ax], hi[ax] = -1, -2
        a[tuple(lo)] = a[tuple(hi)]


def _laplacian(s: np.ndarray, dim: int, inv_h2) -> np.ndarray:
    interior = (slice(1, -1),) * dim
    out = np.zeros(s[interior].shape)
    for ax in range(dim):
        up = list(interior)
        dn = list(interior)
        up[ax] = slice(2, None)
        dn[ax] = slice(0, -2)
        out += (s[tuple(up)] - 2.0 * s[interior] + s[tuple(dn)]) * inv_h2[ax]
    return out


def _solve_cells(a: np.ndarray, r: np.ndarray) -> np.ndarray:
    adotr = np.sum(a * r, axis=-1, keepdims=True)
    asq = np.sum(a * a, axis=-1, keepdims=True)
    return (r + np.cross(a, r) + adotr * a) / (1.0 + asq)


def _finish(grid_shape, dim, v, diffs, converged):
    out = np.zeros(grid_shape + (3,))
    out[(slice(1, -1),) * dim] = v
    max_dev = float(np.max(np.abs(np.sum(v * v, axis=-1) - 1.0)))
    return out, np.asarray(diffs), converged, max_dev


def run_illg_step(prev, curr, he, forcing, alpha, tau, k, inv_h2, vol,
                  eps, max_iters):
    """Three-level implicit midpoint step for the inertial equation."""
    dim = prev.ndim - 1
    interior = (slice(1, -1),) * dim
    prev_i = prev[interior]
    curr_i = curr[interior]
    ctk = 2.0 * alpha * tau / k

    a_base = alpha * prev_i + ctk * curr_i
    r_base = prev_i + ctk * np.cross(curr_i, prev_i)
    if forcing is not None:
        r_base = r_base + (2.0 * k) * forcing

    m_p = 2.0 * curr_i - prev_i
    s = np.empty_like(prev)
    diffs = []
    for _ in range(max_iters):
        s[interior] = m_p + prev_i
        _fill_ghosts(s, dim)
        g = _laplacian(s, dim, inv_h2) + 2.0 * he
        a = a_base + (0.5 * k) * g
        r = r_base - (0.5 * k) * np.cross(prev_i, g)
        v = _solve_cells(a, r)
        diff = float(np.sqrt(vol * np.sum((v - m_p) ** 2)))
        diffs.append(diff)
        m_p = v
        if diff <= eps:
            return _finish(prev.shape[:-1], dim, v, diffs, True)
    return _finish(prev.shape[:-1], dim, m_p, diffs, False)


def run_llg_step(curr, he, alpha, k, inv_h2, vol, eps, max_iters):
    """Two-level implicit midpoint step for the non-inertial equation."""
    dim = curr.ndim - 1
    interior = (slice(1, -1),) * dim
    curr_i = curr[interior]

    m_p = curr_i.copy()
    s = np.empty_like(curr)
    diffs = []
    for _ in range(max_iters):
        s[interior] = m_p + curr_i
        _fill_ghosts(s, dim)
        g = _laplacian(s, dim, inv_h2) + 2.0 * he
        a = alpha * curr_i + (0.25 * k) * g
        r = curr_i - (0.25 * k) * np.cross(curr_i, g)
        v = _solve_cells(a, r)
        diff = float(np.sqrt(vol * np.sum((v - m_p) ** 2)))
        diffs.append(diff)
        m_p = v
        if diff <= eps:
            return _finish(curr.shape[:-1], dim, v, diffs, True)
    return _finish(curr.shape[:-1], dim, m_p, diffs, False)
