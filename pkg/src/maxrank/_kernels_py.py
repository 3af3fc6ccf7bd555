"""Pure numpy fallback for the compiled kernels.

The compiled extension and this module expose the same three sweep
functions with identical floating-point expression structure, so results
agree bitwise and the rest of the package never cares which one it got.
"""

from __future__ import annotations

import numpy as np

HAVE_COMPILED = False


def page_bellman(D, vs_sorted, cbase, gamma, alpha, tterm):
    """One Bellman minimization at a page.

    ``vs_sorted`` holds the page's out-neighbor values sorted ascending;
    ``tterm`` is the teleport term alpha/(1-alpha)*lambda.  Returns
    (value, d_star) with ties resolved to the smallest kept-degree.
    """
    if D == 0:
        # dangling page: the only action keeps nothing and pays no penalty
        return cbase + tterm, 0
    w0 = cbase + gamma + tterm
    wbest = np.inf
    dbest = 0
    s = 0.0
    for d in range(1, D + 1):
        s += vs_sorted[d - 1]
        w = (cbase + gamma * (D - d) / D) + (alpha / d) * s
        if w < wbest:
            wbest = w
            dbest = d
    if w0 <= wbest:
        return w0, 0
    return wbest, dbest


def link_sweep(offsets, targets, pi, out):
    """out[j] = sum over links x->j of pi[x]/D_x; returns dangling mass."""
    n = len(offsets) - 1
    deg = np.diff(offsets)
    per_page = pi / np.maximum(deg, 1)
    out[:] = np.bincount(targets, weights=np.repeat(per_page, deg), minlength=n)
    return float(np.sum(pi[deg == 0]))


# Upper bound on padded-matrix cells per chunk of the vectorized sweep.
_CHUNK_CELLS = 4_000_000


def _bellman_block(offsets, targets, v, cbase, gamma, alpha, tterm, lo, hi):
    """Jacobi Bellman values and d* for pages [lo, hi) against frozen v."""
    deg = offsets[lo + 1 : hi + 1] - offsets[lo:hi]
    rows = hi - lo
    cb = cbase[lo:hi]
    w0 = (cb + gamma) + tterm
    maxdeg = int(deg.max()) if rows else 0
    if maxdeg == 0:
        return cb + tterm, np.zeros(rows, dtype=np.int64)

    # one row per page: out-neighbor values sorted ascending, padded with inf
    nv = v[targets[offsets[lo] : offsets[hi]]]
    col = np.arange(len(nv)) - np.repeat(offsets[lo:hi] - offsets[lo], deg)
    mat = np.full((rows, maxdeg), np.inf)
    mat[np.repeat(np.arange(rows), deg), col] = nv
    mat.sort(axis=1)
    prefix = np.cumsum(mat, axis=1)

    dgrid = np.arange(1, maxdeg + 1, dtype=np.int64)
    dcol = deg[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = (cb[:, None] + gamma * (dcol - dgrid) / dcol) + (alpha / dgrid) * prefix
    w[dgrid[None, :] > dcol] = np.inf
    best = np.argmin(w, axis=1)
    wbest = w[np.arange(rows), best]

    dangling = deg == 0
    take0 = dangling | (w0 <= wbest)
    values = np.where(take0, np.where(dangling, cb + tterm, w0), wbest)
    dstar = np.where(take0, 0, best + 1)
    return values, dstar


def bellman_sweep_jacobi(offsets, targets, v, cbase, gamma, alpha, tterm, out, dstar):
    """Full Jacobi sweep: out, dstar filled from the frozen iterate v."""
    n = len(offsets) - 1
    deg = np.diff(offsets)
    maxdeg = int(deg.max()) if n else 0
    step = max(1, _CHUNK_CELLS // max(1, maxdeg))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        values, ds = _bellman_block(
            offsets, targets, v, cbase, gamma, alpha, tterm, lo, hi
        )
        out[lo:hi] = values
        dstar[lo:hi] = ds


def bellman_sweep_jacobi_range(
    offsets, targets, v, cbase, gamma, alpha, tterm, out, dstar, start, end
):
    """Jacobi sweep restricted to pages [start, end); for threaded callers."""
    values, ds = _bellman_block(
        offsets, targets, v, cbase, gamma, alpha, tterm, start, end
    )
    out[start:end] = values
    dstar[start:end] = ds


def bellman_sweep_gs(offsets, targets, v, cbase, gamma, alpha, tterm, dstar):
    """Gauss-Seidel sweep: v updated in place in page order."""
    for i in range(len(offsets) - 1):
        lo, hi = offsets[i], offsets[i + 1]
        vs = np.sort(v[targets[lo:hi]])
        v[i], dstar[i] = page_bellman(
            int(hi - lo), vs, cbase[i], gamma, alpha, tterm
        )
