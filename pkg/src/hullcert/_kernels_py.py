"""Pure-numpy projection kernel.

Fallback used when the compiled extension is unavailable (or forced via
HULLCERT_BACKEND=python). Same contract as hullcert._kernels.
"""

import numpy as np

BACKEND_NAME = "python"


def fw_project(hull_pts, query, gap_tol, max_iter, lam0=None, dist_tol=0.0):
    """Project `query` onto the convex hull of `hull_pts` rows.

    Frank-Wolfe with away steps on min ||q - C^T lam||^2 over the unit
    simplex with exact line search. Stops when the duality gap falls to
    max(gap_tol, dist_tol * dist): either bound caps the distance error
    at sqrt(gap_tol) resp. dist_tol, the scaled one without forcing
    needless precision on faraway queries. Hard stop after `max_iter`.

    Returns (lam, dist, gap, n_iter, converged).
    """
    C = np.ascontiguousarray(hull_pts, dtype=np.float64)
    q = np.asarray(query, dtype=np.float64)
    K = C.shape[0]

    if lam0 is not None and lam0.shape[0] == K and lam0.sum() > 0:
        lam = np.asarray(lam0, dtype=np.float64).copy()
        lam[lam < 0] = 0.0
        lam /= lam.sum()
    else:
        diffs = C - q
        k0 = int(np.argmin(np.einsum("ij,ij->i", diffs, diffs)))
        lam = np.zeros(K)
        lam[k0] = 1.0

    x = lam @ C
    r = x - q
    n_iter = 0
    gap = np.inf
    converged = False
    for n_iter in range(1, max_iter + 1):
        g = 2.0 * (C @ r)
        gl = float(g @ lam)
        s = int(np.argmin(g))
        gap = gl - g[s]
        if gap <= max(gap_tol, dist_tol * np.sqrt(r @ r)):
            converged = True
            break

        active = np.flatnonzero(lam > 0)
        a = active[int(np.argmax(g[active]))]
        gap_away = g[a] - gl

        if gap >= gap_away:
            dx = C[s] - x
            gamma_max = 1.0
            away = False
        else:
            dx = x - C[a]
            la = lam[a]
            if la >= 1.0:
                break  # single-vertex iterate; gap must already be ~0
            gamma_max = la / (1.0 - la)
            away = True

        dd = float(dx @ dx)
        gamma = gamma_max if dd <= 0.0 else min(gamma_max, max(0.0, -float(r @ dx) / dd))
        if gamma <= 0.0:
            break
        if away:
            lam *= 1.0 + gamma
            lam[a] -= gamma
            if gamma >= gamma_max:
                lam[a] = 0.0  # vertex drop, exact
        else:
            lam *= 1.0 - gamma
            lam[s] += gamma
        x = x + gamma * dx
        r = x - q
        if n_iter % 64 == 0:
            # refresh against drift from incremental updates
            np.clip(lam, 0.0, None, out=lam)
            lam /= lam.sum()
            x = lam @ C
            r = x - q

    np.clip(lam, 0.0, None, out=lam)
    lam /= lam.sum()
    x = lam @ C
    r = x - q
    dist = float(np.sqrt(r @ r))
    g = 2.0 * (C @ r)
    gap = float(g @ lam - g.min())
    if gap <= max(gap_tol, dist_tol * dist):
        converged = True
    return lam, dist, gap, n_iter, converged
