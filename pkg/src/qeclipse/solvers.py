"""Consistency margins over a difference ball.

Both margin families reduce to one primitive: the smallest level ``s`` for
which a polyhedron ``{G z <= h0 + s e}`` meets the ball ``B(c, r)``.

* ``infinity_margin``: rows ``+-phi_i`` all move with the level, so the level
  is ``||Phi z||_inf``.
* ``cone_margins``: for row ``j`` and sign ``s`` the homogeneous cone
  ``|phi_i^T z| <= s phi_j^T z`` is fixed and only ``s phi_j^T z`` moves.

Feasibility of a level is decided by projecting ``c`` onto the polyhedron
(a least-distance program solved with NNLS) and comparing the distance to
``r``.  Instances are normalised to ``||c|| = 1`` before solving, so the
tolerances are dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from qeclipse import _kernel
from qeclipse.geometry import DifferenceBall


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule: certified gap ``<= eps_abs + eps_rel * value`` (normalised units)."""

    eps_abs: float = 1e-6
    eps_rel: float = 1e-4
    max_iter: int = 100_000

    def __post_init__(self):
        if not (self.eps_abs > 0 and self.eps_rel > 0 and self.max_iter > 0):
            raise ValueError("solver tolerances and max_iter must be positive")

    def tolerance(self, value: float) -> float:
        return self.eps_abs + self.eps_rel * abs(value)


@dataclass(frozen=True)
class MarginResult:
    tau: float
    minimizer: np.ndarray
    iterations: int
    converged: bool
    lower: float = 0.0  # certified lower bound on the margin


@dataclass(frozen=True)
class ConeMargins:
    tau_j: np.ndarray  # +inf marks an empty cone
    converged: bool = True
    iterations: int = 0
    lower_j: np.ndarray = field(default=None, repr=False)


def _matrix(phi) -> np.ndarray:
    return np.asarray(getattr(phi, "entries", phi), dtype=float)


def _normalised(phi, d: DifferenceBall):
    a = _matrix(phi)
    if a.ndim != 2 or a.shape[1] != d.n:
        raise ValueError(f"sensing matrix shape {a.shape} does not match dimension {d.n}")
    scale = d.norm_c
    return np.ascontiguousarray(a), d.c / scale, d.r / scale, scale


def infinity_margin(phi, d: DifferenceBall, cfg: SolverConfig = SolverConfig()) -> MarginResult:
    """``tau = min_{z in C-} ||Phi z||_inf``."""
    a, c, r, scale = _normalised(phi, d)
    G = np.ascontiguousarray(np.vstack([a, -a]))
    h0 = np.zeros(G.shape[0])
    e = np.ones(G.shape[0])
    # each row alone already forces |phi_i^T z| >= |phi_i^T c| - r ||phi_i||
    s_lo = max(0.0, float(np.max(np.abs(a @ c) - r * np.linalg.norm(a, axis=1))))
    status, hi, lo, z, iters = _kernel.level_search(
        G, h0, e, c, r, s_lo, cfg.eps_abs, cfg.eps_rel, cfg.max_iter
    )
    if status == _kernel.EMPTY:  # cannot happen: large levels contain the whole ball
        raise RuntimeError("infinity margin reported an empty feasible set")
    if not np.isfinite(hi):
        return MarginResult(np.nan, z * scale, iters, False, lo * scale)
    return MarginResult(hi * scale, z * scale, iters, status == _kernel.OK, lo * scale)


def _cone_rows(a: np.ndarray, j: int, sign: float) -> np.ndarray:
    lead = sign * a[j]
    others = np.delete(a, j, axis=0)
    if len(others) == 0:
        # a single row: the cone is the half-space lead^T z >= 0
        return -lead[None, :]
    return np.vstack([others - lead, -others - lead])


def _cone_piece(a, j, sign, c, r, cfg):
    """``min s phi_j^T z`` over one sign piece of cone ``j``; ``inf`` if empty."""
    lead = sign * a[j]
    cone = np.ascontiguousarray(_cone_rows(a, j, sign))
    # feasibility phase: does the fixed cone meet the ball at all?
    _, dist, _ = _kernel.project(cone, np.zeros(len(cone)), c, np.zeros(len(cone), dtype=np.bool_))
    if dist > r:
        return np.inf, np.inf, True, 1
    G = np.ascontiguousarray(np.vstack([cone, lead[None, :]]))
    e = np.zeros(len(G))
    e[-1] = 1.0
    s_lo = max(0.0, float(lead @ c - r * np.linalg.norm(lead)))
    status, hi, lo, _, iters = _kernel.level_search(
        G, np.zeros(len(G)), e, c, r, s_lo, cfg.eps_abs, cfg.eps_rel, cfg.max_iter
    )
    if status == _kernel.EMPTY:
        return np.inf, np.inf, True, iters + 1
    return hi, lo, status == _kernel.OK, iters + 1


def cone_margins(phi, d: DifferenceBall, cfg: SolverConfig = SolverConfig()) -> ConeMargins:
    """``tau_j = min |phi_j^T z|`` over the part of ``C-`` where row ``j`` dominates.

    The cone ``{|phi_j^T z| >= |phi_i^T z| for all i}`` is split by the sign of
    ``phi_j^T z`` into two convex pieces; ``tau_j`` is the smaller of the two
    piece minima and ``+inf`` when both pieces miss the ball.
    """
    a, c, r, scale = _normalised(phi, d)
    m = a.shape[0]
    tau = np.full(m, np.inf)
    lower = np.full(m, np.inf)
    converged = True
    iterations = 0
    for j in range(m):
        for sign in (1.0, -1.0):
            hi, lo, ok, iters = _cone_piece(a, j, sign, c, r, cfg)
            iterations += iters
            converged &= ok
            if hi < tau[j]:
                tau[j] = hi
                lower[j] = lo
    return ConeMargins(tau * scale, converged, iterations, lower * scale)


def row_space_basis(phi, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the row space of ``phi``.

    Rank is revealed by column-pivoted QR with cut-off ``rtol * sigma_max``.
    """
    a = _matrix(phi)
    q, rr, _ = scipy.linalg.qr(a.T, mode="economic", pivoting=True)
    smax = np.linalg.norm(a, 2)
    if smax == 0:
        return np.zeros((a.shape[1], 0))
    rank = int(np.sum(np.abs(np.diag(rr)) > rtol * smax))
    return q[:, :rank]


def linear_eclipse_holds(phi, d: DifferenceBall) -> bool:
    """True iff ``Ker(Phi)`` misses ``C-``, i.e. ``||P_row c|| > r``."""
    a = _matrix(phi)
    if a.shape[1] != d.n:
        raise ValueError(f"sensing matrix shape {a.shape} does not match dimension {d.n}")
    q = row_space_basis(a)
    return bool(np.linalg.norm(q.T @ d.c) > d.r)
