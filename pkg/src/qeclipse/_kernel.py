"""Compiled inner loops for the margin solvers.

Everything here works on a normalised instance and plain float arrays.  The
central primitive is the Euclidean projection of a point onto a polyhedron
``{z : G z <= h}``, computed as a least-distance program through
Lawson-Hanson NNLS with a warm-startable passive set.
"""

import numpy as np
from numba import njit

# status codes returned by level_search
OK = 0
EMPTY = 1
MAXITER = 2


@njit(cache=True)
def _solve_passive(A, b, passive):
    idx = np.nonzero(passive)[0]
    Ap = np.ascontiguousarray(A[:, idx])
    q, rr = np.linalg.qr(Ap)
    diag = np.abs(np.diag(rr))
    if diag.min() <= 1e-12 * diag.max():
        return idx, np.linalg.lstsq(Ap, b)[0]
    return idx, np.linalg.solve(rr, np.ascontiguousarray(q.T) @ b)


@njit(cache=True)
def nnls(A, b, passive, tol):
    """Lawson-Hanson NNLS, ``min ||A u - b|| s.t. u >= 0``.

    ``passive`` is both the warm-start guess and the returned support.
    """
    n = A.shape[1]
    u = np.zeros(n)
    # warm start: shrink the guessed support until its LS solution is positive
    while passive.any():
        idx, sol = _solve_passive(A, b, passive)
        if (sol > 0).all():
            for k in range(idx.size):
                u[idx[k]] = sol[k]
            break
        for k in range(idx.size):
            if sol[k] <= 0:
                passive[idx[k]] = False
    w = A.T @ (b - A @ u)
    for _ in range(3 * n + 20):
        best = -1
        bw = tol
        for j in range(n):
            if not passive[j] and w[j] > bw:
                bw = w[j]
                best = j
        if best < 0:
            break
        passive[best] = True
        for _ in range(3 * n + 20):
            idx, sol = _solve_passive(A, b, passive)
            if (sol > 0).all():
                u[:] = 0.0
                for k in range(idx.size):
                    u[idx[k]] = sol[k]
                break
            alpha = 1.0
            for k in range(idx.size):
                if sol[k] <= 0:
                    i = idx[k]
                    step = u[i] / (u[i] - sol[k])
                    if step < alpha:
                        alpha = step
            for k in range(idx.size):
                i = idx[k]
                u[i] += alpha * (sol[k] - u[i])
                if u[i] <= 0.0 or (sol[k] <= 0 and alpha * (sol[k] - u[i]) == 0.0):
                    u[i] = 0.0
                    passive[i] = False
            # drop numerically vanished coordinates
            for k in range(idx.size):
                i = idx[k]
                if u[i] <= 1e-15:
                    u[i] = 0.0
                    passive[i] = False
            if not passive.any():
                break
        w = A.T @ (b - A @ u)
    return u


@njit(cache=True)
def project(G, h, c, passive):
    """Project ``c`` onto ``{z : G z <= h}`` (assumed nonempty).

    Returns the projection, its distance to ``c`` and the multipliers of the
    constraints for ``min 0.5 ||z - c||^2``.
    """
    k, n = G.shape
    f = G @ c - h
    lam = np.zeros(k)
    if k == 0 or f.max() <= 0.0:
        passive[:] = False
        return c.copy(), 0.0, lam
    M = np.empty((n + 1, k))
    M[:n, :] = -G.T
    M[n, :] = f
    d = np.zeros(n + 1)
    d[n] = 1.0
    scale = 0.0
    for j in range(k):
        s = 0.0
        for i in range(n + 1):
            s += abs(M[i, j])
        if s > scale:
            scale = s
    tol = 10.0 * (n + k) * scale * 2.220446049250313e-16
    u = nnls(M, d, passive, tol)
    rho = M @ u - d
    denom = -rho[n]
    x = -rho[:n] / rho[n]
    for j in range(k):
        lam[j] = u[j] / denom
    return c + x, np.sqrt(x @ x), lam


@njit(cache=True)
def level_value(G, h0, e, z):
    best = -np.inf
    gz = G @ z
    for k in range(G.shape[0]):
        if e[k]:
            v = gz[k] - h0[k]
            if v > best:
                best = v
    return best


@njit(cache=True)
def level_search(G, h0, e, c, r, s_lo, tol_abs, tol_rel, max_iter):
    """Smallest level ``s`` with ``{G z <= h0 + s e}`` meeting ``B(c, r)``.

    Newton steps on ``s -> 0.5 dist(c, P_s)^2`` approach the optimum from
    below (the map is convex and nonincreasing), so every infeasible probe is
    a certified lower bound.  Feasible probes give primal points and upper
    bounds; every fifth probe bisects the bracket to guard against slow
    Newton progress.  Returns ``(status, upper, lower, z, iterations)``.
    """
    k = G.shape[0]
    passive = np.zeros(k, dtype=np.bool_)
    hi = np.inf
    z_hi = c.copy()
    lo = s_lo
    s = s_lo
    target = -np.inf  # Newton point computed at lo
    for it in range(1, max_iter + 1):
        z, dist, lam = project(G, h0 + s * e, c, passive)
        if dist <= r:
            val = level_value(G, h0, e, z)
            if val < hi:
                hi = val
                z_hi = z
            if it == 1:
                # the certified lower bound is feasible, hence optimal
                return OK, s_lo, s_lo, z, it
            target = -np.inf
        else:
            lo = max(lo, s)
            slope = 0.0
            for j in range(k):
                if e[j]:
                    slope += lam[j]
            if slope > 0.0:
                target = lo + 0.5 * (dist * dist - r * r) / slope
            elif hi == np.inf:
                # the level constraint is inactive and the ball is still out of reach
                return EMPTY, hi, lo, z_hi, it
            else:
                target = -np.inf
        if hi < np.inf and hi - lo <= tol_abs + tol_rel * abs(hi):
            return OK, hi, lo, z_hi, it
        nudge = lo + 0.5 * (tol_abs + tol_rel * abs(lo))
        if it % 5 == 0 and hi < np.inf:
            s = 0.5 * (lo + hi)
        elif target > nudge and target < hi:
            s = target
        else:
            s = nudge
        if s >= hi:
            s = 0.5 * (lo + hi)
    return MAXITER, hi, lo, z_hi, max_iter
