"""Statistical battery for the quantised map, run by ``qeclipse distcheck``.

Each check returns a ``CheckResult``; thresholds follow the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qeclipse.embedding import (
    KAPPA0,
    QuantisedMap,
    SoftDistanceParams,
    apply,
    draw_dither,
    draw_sensing,
    l1_distance,
    quantise,
    soft_l1_distance,
)
from qeclipse.rng import child_seed, generator


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def dither_unbiasedness(seed: int = 0, pairs: int = 20, dithers: int = 100_000, delta: float = 1.0):
    """Mean of ``|Q(a + xi) - Q(b + xi)|`` over fresh dithers equals ``|a - b|``."""
    rng = generator(seed, 0)
    gaps = np.linspace(0.1, 7.3, pairs) * delta
    ok = 0
    worst = 0.0
    for i, gap in enumerate(gaps):
        a = rng.uniform(-10, 10)
        b = a + gap
        xi = draw_dither(dithers, delta, child_seed(seed, i))
        x = np.abs(quantise(a + xi, delta) - quantise(b + xi, delta))
        z = abs(x.mean() - gap) / (x.std(ddof=1) / np.sqrt(dithers))
        worst = max(worst, z)
        ok += z <= 4
    return CheckResult("dither_unbiasedness", bool(ok >= pairs - 1), f"{ok}/{pairs} within 4 SE (max {worst:.2f} SE)")


def l1_l2_concentration(seed: int = 0, m: int = 2000, n: int = 64, vectors: int = 100):
    """``(kappa0 / m) ||Phi u||_1`` stays within [0.9, 1.1] for unit ``u``."""
    phi = draw_sensing(m, n, seed).entries
    u = generator(seed, 1).standard_normal((vectors, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    vals = KAPPA0 / m * np.abs(u @ phi.T).sum(axis=1)
    return CheckResult(
        "l1_l2_concentration",
        bool(np.all((vals >= 0.9) & (vals <= 1.1))),
        f"range [{vals.min():.4f}, {vals.max():.4f}]",
    )


def dithered_concentration(seed: int = 0, m: int = 2000, draws: int = 100, delta: float = 1.0):
    """``|D(Q(a + xi), Q(b + xi)) - D(a, b)| <= 0.1 delta`` on every dither draw."""
    rng = generator(seed, 2)
    a = rng.normal(0, 5 * delta, m)
    b = rng.normal(0, 5 * delta, m)
    base = l1_distance(a, b)
    dev = []
    for k in range(draws):
        xi = draw_dither(m, delta, child_seed(seed + 1, k))
        dev.append(abs(l1_distance(quantise(a + xi, delta), quantise(b + xi, delta)) - base))
    worst = max(dev)
    return CheckResult("dithered_concentration", worst <= 0.1 * delta, f"max deviation {worst / delta:.4f} delta")


def _perturbation(rng, m, rho):
    # l1 budget rho spread over all, a few, or a single coordinate
    support = rng.choice([m, max(1, m // 8), 1])
    v = np.zeros(m)
    idx = rng.choice(m, size=support, replace=False)
    v[idx] = rng.standard_normal(support)
    return rho * rng.uniform(0.5, 1.0) * v / np.abs(v).sum()


def soft_continuity(seed: int = 0, instances: int = 10_000, m: int = 16, delta: float = 1.0, P: float = 10.0):
    """Both soft-distance continuity inequalities hold on random perturbations."""
    rng = generator(seed, 3)
    rho = 0.01 * m * delta
    shift = rho * P / m
    slack = 8 * (delta / P + rho / m)
    bad = 0
    for _ in range(instances):
        a = rng.uniform(-3, 3, m) * delta
        b = rng.uniform(-3, 3, m) * delta
        a0 = a + _perturbation(rng, m, rho)
        b0 = b + _perturbation(rng, m, rho)
        t = rng.uniform(-0.5 * delta + shift, 0.5 * delta - shift) * 0.999
        here = soft_l1_distance(a, b, SoftDistanceParams(t, delta))
        up = soft_l1_distance(a0, b0, SoftDistanceParams(t + shift, delta))
        down = soft_l1_distance(a0, b0, SoftDistanceParams(t - shift, delta))
        bad += here < up - slack
        bad += here > down + slack
    return CheckResult("soft_continuity", bad == 0, f"{bad} violations over {instances} instances")


def consistency_implication(seed: int = 0, pairs: int = 10_000, m: int = 8, n: int = 4, delta: float = 1.0):
    """Equal signatures imply ``||Phi (x1 - x2)||_inf < delta``."""
    rng = generator(seed, 4)
    qmap = QuantisedMap(draw_sensing(m, n, seed), delta, draw_dither(m, delta, seed + 1))
    x1 = rng.standard_normal((pairs, n))
    x2 = x1 + rng.standard_normal((pairs, n)) * rng.uniform(0, 0.5, (pairs, 1))
    same = np.all(apply(qmap, x1) == apply(qmap, x2), axis=1)
    gap = np.abs((x1 - x2) @ qmap.phi.entries.T).max(axis=1)
    bad = int(np.sum(same & (gap >= delta)))
    return CheckResult("consistency_implication", bad == 0, f"{int(same.sum())} consistent pairs, {bad} violations")


def lattice(seed: int = 0, delta: float = 0.37):
    """Signatures are integer multiples of delta."""
    qmap = QuantisedMap(draw_sensing(16, 5, seed), delta, draw_dither(16, delta, seed + 1))
    y = apply(qmap, generator(seed, 5).standard_normal((1000, 5)) * 10)
    k = y / delta
    ok = bool(np.all(np.abs(k - np.round(k)) < 1e-9))
    return CheckResult("lattice", ok, "all signature entries in delta*Z" if ok else "off-lattice entries")


def run_all(seed: int = 0):
    return [
        dither_unbiasedness(seed),
        l1_l2_concentration(seed),
        dithered_concentration(seed),
        soft_continuity(seed),
        consistency_implication(seed),
        lattice(seed),
    ]
