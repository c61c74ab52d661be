"""Balls, their difference set, and the spherical-cap width machinery.

For two disjoint balls the difference set is again a ball ``B(c, r)`` that
misses the origin, and the directions it spans form a spherical cap of
half-angle ``arcsin(r / ||c||)`` around ``c / ||c||``.  Support values of
linear forms over that cap are closed form, which is all the width estimate
needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qeclipse.rng import generator


def _frozen_vector(x) -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class Ball:
    """Euclidean ball ``center + radius * B_2^n``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = _frozen_vector(self.center)
        if center.size < 1:
            raise ValueError("ball dimension must be at least 1")
        if not np.all(np.isfinite(center)):
            raise ValueError("ball center must be finite")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n(self) -> int:
        return self.center.size

    def contains(self, x, atol: float = 0.0) -> bool:
        return bool(np.linalg.norm(np.asarray(x) - self.center) <= self.radius + atol)


@dataclass(frozen=True)
class DifferenceBall:
    """The difference set ``C1 - C2 = B(c, r)`` of two disjoint balls."""

    c: np.ndarray
    r: float

    def __post_init__(self):
        c = _frozen_vector(self.c)
        if c.size < 1:
            raise ValueError("dimension must be at least 1")
        if not (np.isfinite(self.r) and self.r > 0):
            raise ValueError(f"radius must be positive, got {self.r}")
        if not np.linalg.norm(c) > self.r:
            raise ValueError(
                f"balls are not disjoint: ||c|| = {np.linalg.norm(c)!r} <= r = {self.r!r}"
            )
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", float(self.r))

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def norm_c(self) -> float:
        return float(np.linalg.norm(self.c))

    def contains(self, z, atol: float = 0.0) -> bool:
        return bool(np.linalg.norm(np.asarray(z) - self.c) <= self.r + atol)


@dataclass(frozen=True)
class CapAngle:
    """Half-angle (radians) of the direction cap spanned by a difference ball."""

    theta: float

    def __post_init__(self):
        if not 0 < self.theta < np.pi / 2:
            raise ValueError(f"cap half-angle must lie in (0, pi/2), got {self.theta}")


def difference_set(c1: Ball, c2: Ball) -> DifferenceBall:
    if c1.n != c2.n:
        raise ValueError(f"dimension mismatch: {c1.n} vs {c2.n}")
    return DifferenceBall(c1.center - c2.center, c1.radius + c2.radius)


def separation(d: DifferenceBall) -> float:
    """Smallest norm in the difference set, ``||c|| - r``."""
    return d.norm_c - d.r


def cap_half_angle(d: DifferenceBall) -> CapAngle:
    return CapAngle(float(np.arcsin(d.r / d.norm_c)))


def _cap_support(g: np.ndarray, axis: np.ndarray, theta: float) -> np.ndarray:
    # sup of <v, x> over unit x within angle theta of axis, for each row v;
    # negative values are kept, the caller takes the max over +-g
    norms = np.linalg.norm(g, axis=-1)
    cos = np.clip((g @ axis) / norms, -1.0, 1.0)
    angle = np.arccos(cos)
    return norms * np.cos(np.clip(angle - theta, 0.0, np.pi))


def width_sample(g, d: DifferenceBall):
    """``sup_{x in S} |g^T x|`` for the direction cap ``S`` of ``d``.

    Accepts one vector or a stack of vectors (one per row).
    """
    g = np.asarray(g, dtype=float)
    if g.shape[-1] != d.n:
        raise ValueError(f"dimension mismatch: {g.shape[-1]} vs {d.n}")
    if np.any(np.linalg.norm(g, axis=-1) == 0):
        raise ValueError("width_sample needs a nonzero vector")
    axis = d.c / d.norm_c
    theta = cap_half_angle(d).theta
    out = np.maximum(_cap_support(g, axis, theta), _cap_support(-g, axis, theta))
    return float(out) if out.ndim == 0 else out


def mean_width_estimate(d: DifferenceBall, samples: int, seed: int, chunk: int = 8192):
    """Monte Carlo Gaussian mean width of the direction cap of ``d``.

    Returns ``(estimate, standard_error)``; deterministic for a given seed.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    rng = generator(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        g = rng.standard_normal((k, d.n))
        w = width_sample(g, d)
        total += float(np.sum(w))
        total_sq += float(np.sum(w * w))
        done += k
    mean = total / samples
    var = max(total_sq - samples * mean * mean, 0.0) / (samples - 1)
    return mean, float(np.sqrt(var / samples))
