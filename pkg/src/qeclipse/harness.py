"""Grid experiments: seeded trials over (m, sigma, delta), CSV persistence and
phase-curve extraction.

Margins are solved once per (m, sigma, trial) and reused for every delta,
since delta only enters through the indicator arithmetic.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field, fields
from pathlib import Path

import numpy as np

from qeclipse.certificates import aggregate, solve_trial
from qeclipse.embedding import draw_sensing
from qeclipse.geometry import Ball, difference_set
from qeclipse.rng import child_seed, generator
from qeclipse.solvers import SolverConfig


def _strictly_increasing(values) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


@dataclass(frozen=True)
class GridSpec:
    n: int
    m_values: tuple
    sigma_values: tuple
    delta_values: tuple
    r: float = 2.0
    trials: int = 64
    master_seed: int = 0
    level: float = 0.9
    direction_seed: int = 0

    def __post_init__(self):
        for name in ("m_values", "sigma_values", "delta_values"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"{name} must be nonempty")
            if not _strictly_increasing(values):
                raise ValueError(f"{name} must be strictly increasing, got {values}")
            object.__setattr__(self, name, values)
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if min(self.m_values) < 1:
            raise ValueError("m values must be positive")
        if min(self.sigma_values) <= 0 or min(self.delta_values) <= 0:
            raise ValueError("sigma and delta values must be positive")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.trials < 2:
            raise ValueError("need at least two trials")
        if not 0 < self.level < 1:
            raise ValueError(f"level must lie in (0, 1), got {self.level}")


def _powers(lo, hi):
    return tuple(float(2**k) for k in range(lo, hi + 1))


PROFILES = {
    # CI-sized grid
    "desk": dict(
        n=32,
        m_values=tuple(2**k for k in range(0, 6)),
        sigma_values=_powers(0, 7),
        delta_values=_powers(0, 5),
        r=2.0,
        trials=64,
    ),
    # the grid of the original experiment
    "paper": dict(
        n=64,
        m_values=tuple(2**k for k in range(0, 7)),
        sigma_values=_powers(0, 9),
        delta_values=_powers(0, 9),
        r=2.0,
        trials=128,
    ),
}


@dataclass(frozen=True)
class ResultRow:
    n: int
    m: int
    sigma: float
    delta: float
    r: float
    trials: int
    master_seed: int
    p_bar_hat: float
    p_bbar_hat: float
    p_lin_hat: float
    se_bar: float
    se_bbar: float
    se_lin: float
    excluded_trials: int


_INT_FIELDS = {"n", "m", "trials", "master_seed", "excluded_trials"}
FIELDNAMES = [f.name for f in fields(ResultRow)]


@dataclass(frozen=True)
class PhaseCurve:
    """Per sigma, the smallest grid ``m`` whose estimate reaches ``level`` (or None)."""

    delta: float
    points: list = field(default_factory=list)
    level: float = 0.9

    def m_star(self, sigma):
        return dict(self.points)[sigma]


def scene_from_sigma(n: int, sigma: float, r: float, direction_seed: int) -> tuple[Ball, Ball]:
    """Two balls of radius ``r/2`` whose difference set is ``B((sigma + r) u, r)``.

    The unit direction ``u`` depends on ``direction_seed`` only, so it stays
    fixed across a whole grid.
    """
    if not (sigma > 0 and r > 0):
        raise ValueError("sigma and r must be positive")
    u = generator(direction_seed).standard_normal(n)
    u /= np.linalg.norm(u)
    return Ball(np.zeros(n), r / 2), Ball(-(sigma + r) * u, r / 2)


def _solve_cell(args):
    n, m, sigma, r, trials, master_seed, direction_seed, cfg = args
    d = difference_set(*scene_from_sigma(n, sigma, r, direction_seed))
    out = []
    for k in range(trials):
        seed = child_seed(master_seed, k)
        out.append(solve_trial(draw_sensing(m, n, seed), d, cfg, k, seed))
    return out


def solve_grid(spec: GridSpec, cfg: SolverConfig = SolverConfig(), workers: int = 1):
    """Trial margins for every (m, sigma) cell, keyed by ``(m, sigma)``.

    Trial ``k`` of every cell uses the sensing draw of child seed
    ``(master_seed, k)``; with row-major generation the ``m``-row matrices are
    nested prefixes of each other.
    """
    cells = [(m, s) for m in spec.m_values for s in spec.sigma_values]
    jobs = [
        (spec.n, m, s, spec.r, spec.trials, spec.master_seed, spec.direction_seed, cfg)
        for m, s in cells
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_cell, jobs))
    else:
        results = [_solve_cell(job) for job in jobs]
    return dict(zip(cells, results))


def rows_from_solves(spec: GridSpec, solves) -> list[ResultRow]:
    rows = []
    for m in spec.m_values:
        for s in spec.sigma_values:
            for delta in spec.delta_values:
                est = aggregate(solves[(m, s)], delta)
                rows.append(
                    ResultRow(
                        spec.n, m, s, delta, spec.r, spec.trials, spec.master_seed,
                        est.p_bar_hat, est.p_bbar_hat, est.p_lin_hat,
                        est.se_bar, est.se_bbar, est.se_lin, est.excluded,
                    )
                )
    return rows


def run_grid(spec: GridSpec, cfg: SolverConfig = SolverConfig(), out_path=None, workers: int = 1) -> list[ResultRow]:
    """One row per (m, sigma, delta) in lexicographic grid order; optionally written as CSV."""
    rows = rows_from_solves(spec, solve_grid(spec, cfg, workers))
    if out_path is not None:
        write_rows(rows, out_path)
    return rows


def _fmt(name, value):
    if name in _INT_FIELDS:
        return str(int(value))
    return repr(float(value))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELDNAMES)
    for row in rows:
        writer.writerow([_fmt(k, v) for k, v in zip(FIELDNAMES, astuple(row))])
    return buf.getvalue()


def write_rows(rows, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(rows_to_csv(rows), encoding="utf-8", newline="")
    os.replace(tmp, path)


def read_rows(path) -> list[ResultRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != FIELDNAMES:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [
            ResultRow(**{k: int(v) if k in _INT_FIELDS else float(v) for k, v in rec.items()})
            for rec in reader
        ]


def _grid_for_delta(rows, delta, field_name):
    sel = [row for row in rows if row.delta == delta]
    if not sel:
        raise ValueError(f"no rows for delta = {delta}")
    ms = sorted({row.m for row in sel})
    sigmas = sorted({row.sigma for row in sel})
    table = {}
    for row in sel:
        key = (row.m, row.sigma)
        if key in table:
            raise ValueError(f"duplicate grid cell {key} for delta = {delta}")
        table[key] = getattr(row, field_name)
    if len(table) != len(ms) * len(sigmas):
        raise ValueError(f"ragged grid for delta = {delta}: {len(table)} of {len(ms) * len(sigmas)} cells")
    return ms, sigmas, table


def extract_phase_curve(rows, delta: float, level: float = 0.9, field_name: str = "p_bbar_hat") -> PhaseCurve:
    """Raw grid crossing of ``level`` per sigma; no interpolation or smoothing."""
    ms, sigmas, table = _grid_for_delta(rows, delta, field_name)
    points = []
    for s in sigmas:
        m_star = next((m for m in ms if table[(m, s)] >= level), None)
        points.append((s, m_star))
    return PhaseCurve(delta, points, level)
