"""Independent brute-force references for the margin solvers (n = 2 or 3).

Neither reference shares code with the solvers.  Both rest on two facts:

* if the kernel of ``Phi`` meets ``B(c, r)`` then ``tau = 0`` and every
  ``tau_j = 0`` (a kernel point ties every row at zero);
* otherwise every minimiser lies on the sphere ``|z - c| = r`` (a convex
  objective without interior zero, and a linear objective over a pointed
  cone cut by a ball whose extreme points all sit on the sphere).

The sphere is searched by a Lipschitz branch and bound: a cell is dropped
only when its centre value minus the Lipschitz slack already exceeds the
best value found, so the result is within ``target`` of the true minimum.
"""

from __future__ import annotations

import numpy as np


def kernel_meets_ball(phi, c, r) -> bool:
    u, s, vt = np.linalg.svd(phi)
    rank = int(np.sum(s > 1e-12 * s.max()))
    row = vt[:rank]
    return bool(np.linalg.norm(row @ c) <= r)


def _sphere_points(c, r, theta, phi_angle):
    st = np.sin(theta)
    u = np.stack([st * np.cos(phi_angle), st * np.sin(phi_angle), np.cos(theta)], axis=-1)
    return c + r * u


def _circle_min(fn, c, r, lip, target):
    count = int(np.ceil(np.pi * r * lip / target)) + 8
    ang = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
    value, gap = fn(c + r * np.stack([np.cos(ang), np.sin(ang)], axis=-1))
    feasible = gap <= 0
    return float(np.min(value[feasible])) if feasible.any() else float("inf")


def _sphere_min(fn, c, r, lip, target, coarse=(48, 96), split=4):
    # fn returns (objective, gap); gap <= 0 marks feasibility, both lip- and
    # 2 lip-Lipschitz in z respectively
    t_edges = np.linspace(0.0, np.pi, coarse[0] + 1)
    p_edges = np.linspace(0.0, 2 * np.pi, coarse[1] + 1)
    t0, p0 = np.meshgrid(t_edges[:-1], p_edges[:-1], indexing="ij")
    cells = np.stack([t0.ravel(), p0.ravel()], axis=-1)
    dt, dp = np.pi / coarse[0], 2 * np.pi / coarse[1]
    best = np.inf
    while True:
        value, gap = fn(_sphere_points(c, r, cells[:, 0] + dt / 2, cells[:, 1] + dp / 2))
        err = lip * r * (dt + dp) / 2  # bound on |z - centre| times lip over a cell
        feasible = gap <= 0
        if feasible.any():
            best = min(best, float(np.min(value[feasible])))
        if err <= target:
            return best
        # a cell survives if it may hold a feasible point that beats the incumbent
        keep = (gap <= 2 * err) & (value - err <= best)
        if not keep.any():
            return best
        cells = cells[keep]
        dt, dp = dt / split, dp / split
        offs = np.arange(split)
        ot, op = np.meshgrid(offs * dt, offs * dp, indexing="ij")
        cells = (cells[:, None, :] + np.stack([ot.ravel(), op.ravel()], axis=-1)[None]).reshape(-1, 2)
        if len(cells) > 4_000_000:
            raise RuntimeError("oracle refinement exploded")


def _minimise(fn, c, r, lip, target):
    if c.size == 2:
        return _circle_min(fn, c, r, lip, target)
    if c.size == 3:
        return _sphere_min(fn, c, r, lip, target)
    raise ValueError("brute force supports n = 2 or 3")


def brute_tau(phi, c, r, target=1e-4):
    phi = np.asarray(phi, float)
    c = np.asarray(c, float)
    if kernel_meets_ball(phi, c, r):
        return 0.0
    lip = float(np.max(np.linalg.norm(phi, axis=1)))

    def fn(pts):
        value = np.max(np.abs(pts @ phi.T), axis=1)
        return value, np.full(len(pts), -1.0)

    return _minimise(fn, c, r, lip, target)


def brute_tau_j(phi, c, r, j, target=1e-4):
    """Minimum of ``|phi_j^T z|`` over sphere points where row ``j`` dominates; ``inf`` if none."""
    phi = np.asarray(phi, float)
    c = np.asarray(c, float)
    if kernel_meets_ball(phi, c, r):
        return 0.0
    lip = float(np.max(np.linalg.norm(phi, axis=1)))

    def fn(pts):
        prod = np.abs(pts @ phi.T)
        return prod[:, j], np.max(prod, axis=1) - prod[:, j]

    return _minimise(fn, c, r, lip, target)
