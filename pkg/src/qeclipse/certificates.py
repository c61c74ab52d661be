"""Per-draw certificates and their Monte Carlo averages.

For one sensing matrix the three per-trial values are

* ``1[tau > delta]``: no consistent cross-class pair for any dither;
* ``prod_j min(1, tau_j / delta)``: probability over the dither that every
  cone's row separates its pairs;
* ``1[tau > 0]``: the kernel misses the difference set (linear case).

They satisfy ``first <= second <= third`` for every draw.  The dither never
has to be sampled for these; it only appears in ``collision_search``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qeclipse.embedding import QuantisedMap, apply, draw_sensing
from qeclipse.geometry import Ball, DifferenceBall, difference_set
from qeclipse.rng import child_seed, generator
from qeclipse.solvers import SolverConfig, cone_margins, infinity_margin, linear_eclipse_holds

MAX_EXCLUDED_FRACTION = 0.05


class SolverBudgetExceeded(RuntimeError):
    """More than 5% of the trials in one estimate failed to converge."""


@dataclass(frozen=True)
class TrialSolve:
    """Margins of one sensing draw; independent of delta, so reusable across it."""

    trial_index: int
    seed: int
    tau: float
    tau_j: np.ndarray
    converged: bool
    linear: bool = True  # closed-form kernel test


@dataclass(frozen=True)
class TrialOutcome:
    trial_index: int
    seed: int
    tau: float
    pbar_indicator: int
    pbarbar_factor: float
    linear_indicator: int


@dataclass(frozen=True)
class ProbabilityEstimates:
    p_bar_hat: float
    p_bbar_hat: float
    p_lin_hat: float
    se_bar: float
    se_bbar: float
    se_lin: float
    trials: int
    excluded: int = 0


def _check_delta(delta):
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")


def pbar_indicator(tau: float, delta: float) -> int:
    _check_delta(delta)
    return int(tau > delta)


def pbarbar_factor(tau_j, delta: float) -> float:
    """``prod_j min(1, tau_j / delta)``; empty cones (``inf``) contribute 1."""
    _check_delta(delta)
    tau_j = np.asarray(tau_j, dtype=float)
    return float(np.prod(np.minimum(1.0, tau_j / delta)))


def solve_trial(phi, d: DifferenceBall, cfg: SolverConfig, trial_index: int = 0, seed: int = 0) -> TrialSolve:
    tm = infinity_margin(phi, d, cfg)
    cm = cone_margins(phi, d, cfg)
    linear = linear_eclipse_holds(phi, d)
    return TrialSolve(trial_index, seed, tm.tau, cm.tau_j, tm.converged and cm.converged, linear)


def outcome(solve: TrialSolve, delta: float) -> TrialOutcome:
    if not solve.linear:
        # the kernel meets C-: tau = 0 and the cone holding the kernel point has tau_j = 0
        return TrialOutcome(solve.trial_index, solve.seed, 0.0, 0, 0.0, 0)
    # every cone lies inside C-, so tau is a valid floor for each tau_j; applying
    # it keeps the dominance chain exact when tau sits within solver tolerance of delta
    tau_j = np.maximum(solve.tau_j, solve.tau)
    return TrialOutcome(
        solve.trial_index,
        solve.seed,
        solve.tau,
        pbar_indicator(solve.tau, delta),
        pbarbar_factor(tau_j, delta),
        int(solve.tau > 0),
    )


def _mean_se(x: np.ndarray):
    if x.size < 2:
        return float(np.mean(x)) if x.size else float("nan"), float("nan")
    return float(np.mean(x)), float(np.std(x, ddof=1) / np.sqrt(x.size))


def aggregate(solves, delta: float) -> ProbabilityEstimates:
    """Average trial outcomes at one ``delta``, excluding non-converged trials."""
    _check_delta(delta)
    solves = list(solves)
    kept = [s for s in solves if s.converged]
    excluded = len(solves) - len(kept)
    if solves and excluded / len(solves) > MAX_EXCLUDED_FRACTION:
        raise SolverBudgetExceeded(
            f"{excluded} of {len(solves)} trials did not converge (limit {MAX_EXCLUDED_FRACTION:.0%})"
        )
    outs = [outcome(s, delta) for s in kept]
    bar = np.array([o.pbar_indicator for o in outs], dtype=float)
    bbar = np.array([o.pbarbar_factor for o in outs], dtype=float)
    lin = np.array([o.linear_indicator for o in outs], dtype=float)
    (pb, sb), (pbb, sbb), (pl, sl) = _mean_se(bar), _mean_se(bbar), _mean_se(lin)
    return ProbabilityEstimates(pb, pbb, pl, sb, sbb, sl, len(kept), excluded)


def solve_trials(scene, m: int, trials: int, master_seed: int, cfg: SolverConfig = SolverConfig()):
    """Margins for ``trials`` independent draws of an ``m``-row sensing matrix.

    Trial ``k`` uses the child seed ``(master_seed, k)`` only, so any subset or
    ordering of trials reproduces the same numbers.
    """
    d = difference_set(*scene)
    out = []
    for k in range(trials):
        seed = child_seed(master_seed, k)
        phi = draw_sensing(m, d.n, seed)
        out.append(solve_trial(phi, d, cfg, k, seed))
    return out


def estimate(
    scene: tuple[Ball, Ball],
    m: int,
    delta: float,
    trials: int,
    master_seed: int,
    cfg: SolverConfig = SolverConfig(),
) -> ProbabilityEstimates:
    if trials < 2:
        raise ValueError("need at least two trials")
    _check_delta(delta)
    return aggregate(solve_trials(scene, m, trials, master_seed, cfg), delta)


def _facing_samples(rng, center, radius, toward, k):
    # points on the sphere clustered around the pole facing ``toward``
    n = center.size
    spread = rng.uniform(0.0, 1.0, size=(k, 1))
    v = toward + spread * rng.standard_normal((k, n)) / np.sqrt(n)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return center + radius * v


def _uniform_samples(rng, center, radius, k):
    n = center.size
    v = rng.standard_normal((k, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    rho = rng.uniform(0.0, 1.0, size=(k, 1)) ** (1.0 / n)
    return center + radius * rho * v


def collision_search(qmap: QuantisedMap, scene: tuple[Ball, Ball], samples: int, seed: int, chunk: int = 4096):
    """Look for ``x1 in C1, x2 in C2`` with equal signatures by sampling.

    Half of the pairs sit on the facing caps of the two spheres (where
    consistent pairs are most likely), half are uniform in each ball.  A
    returned pair is a witness of ``A(C1) & A(C2) != {}``; ``None`` proves
    nothing.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    c1, c2 = scene
    if c1.n != qmap.phi.n or c2.n != qmap.phi.n:
        raise ValueError("scene dimension does not match the map")
    axis = c2.center - c1.center
    axis = axis / np.linalg.norm(axis)
    # shrink slightly so rounding never puts a sample outside its ball
    r1 = c1.radius * (1 - 1e-9)
    r2 = c2.radius * (1 - 1e-9)
    rng = generator(seed)
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        facing = rng.random(k) < 0.5
        x1 = _uniform_samples(rng, c1.center, r1, k)
        x2 = _uniform_samples(rng, c2.center, r2, k)
        f1 = _facing_samples(rng, c1.center, r1, axis, k)
        f2 = _facing_samples(rng, c2.center, r2, -axis, k)
        x1[facing] = f1[facing]
        x2[facing] = f2[facing]
        hit = np.flatnonzero(np.all(apply(qmap, x1) == apply(qmap, x2), axis=1))
        if hit.size:
            i = hit[0]
            return x1[i], x2[i]
        done += k
    return None
