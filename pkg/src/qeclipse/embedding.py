"""Gaussian sensing, uniform dither and the quantised map ``Q(Phi x + xi)``.

Also carries the threshold-counting distances used to reason about the
quantiser: the hard count ``d(a, b)`` and its softened version ``d^t`` with
forbidden (``t > 0``) or relaxed (``t < 0``) intervals around thresholds.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from qeclipse.rng import generator

KAPPA0 = float(np.sqrt(np.pi / 2))


@dataclass(frozen=True)
class SensingMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"sensing matrix must be a nonempty 2-D array, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("sensing matrix entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    def row(self, j: int) -> np.ndarray:
        return self.entries[j]

    def rows(self, k: int) -> "SensingMatrix":
        """The first ``k`` rows as a new matrix."""
        return SensingMatrix(self.entries[:k])

    def to_bytes(self) -> bytes:
        """Little-endian ``uint64 m, uint64 n`` header, then float64 entries row-major."""
        return struct.pack("<QQ", self.m, self.n) + self.entries.astype("<f8").tobytes(order="C")

    @classmethod
    def from_bytes(cls, data: bytes) -> "SensingMatrix":
        if len(data) < 16:
            raise ValueError("truncated sensing matrix header")
        m, n = struct.unpack("<QQ", data[:16])
        body = data[16:]
        if len(body) != 8 * m * n:
            raise ValueError(f"expected {8 * m * n} payload bytes, got {len(body)}")
        return cls(np.frombuffer(body, dtype="<f8").reshape(m, n))

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "SensingMatrix":
        return cls.from_bytes(Path(path).read_bytes())


@dataclass(frozen=True)
class QuantisedMap:
    """One realisation of ``x -> Q_delta(Phi x + xi)``."""

    phi: SensingMatrix
    delta: float
    xi: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta}")
        xi = np.array(self.xi, dtype=float).reshape(-1)
        if xi.size != self.phi.m:
            raise ValueError(f"dither has {xi.size} entries, expected {self.phi.m}")
        if np.any(xi < 0) or np.any(xi > self.delta):
            raise ValueError("dither entries must lie in [0, delta]")
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "delta", float(self.delta))


@dataclass(frozen=True)
class SoftDistanceParams:
    t: float
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not abs(self.t) < self.delta / 2:
            raise ValueError(f"|t| must be below delta/2, got t={self.t}, delta={self.delta}")


def draw_sensing(m: int, n: int, seed: int) -> SensingMatrix:
    """i.i.d. N(0, 1) entries, generated row-major from ``seed``.

    Because generation is sequential, the first ``k`` rows of an ``m``-row
    draw equal the ``k``-row draw for the same seed.
    """
    if m < 1 or n < 1:
        raise ValueError(f"need m, n >= 1, got {m}, {n}")
    return SensingMatrix(generator(seed).standard_normal((m, n)))


def draw_dither(m: int, delta: float, seed: int) -> np.ndarray:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return generator(seed).uniform(0.0, delta, size=m)


def quantise(v, delta: float):
    """Uniform quantiser ``delta * floor(v / delta)``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return delta * np.floor(np.asarray(v, dtype=float) / delta)


def apply(qmap: QuantisedMap, x) -> np.ndarray:
    """Signature ``Q_delta(Phi x + xi)``; accepts one point or a stack of rows."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != qmap.phi.n:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {qmap.phi.n}")
    return quantise(x @ qmap.phi.entries.T + qmap.xi, qmap.delta)


def l1_distance(a, b) -> float:
    """``(1/m) ||a - b||_1``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a - b)))


def hard_distance(a, b, delta: float):
    """``delta`` times the number of thresholds ``k delta`` in ``[min(a,b), max(a,b)]``.

    Equals ``|Q(a) - Q(b)|`` unless an endpoint sits exactly on a threshold.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = np.minimum(a, b) / delta
    hi = np.maximum(a, b) / delta
    count = np.maximum(np.floor(hi) - np.ceil(lo) + 1.0, 0.0)
    return delta * count


def _first_below(x, thr, d):
    # smallest integer k with x - k d < thr, settled with the predicate itself
    k = np.floor((x - thr) / d) + 1.0
    k = np.where(x - (k - 1.0) * d < thr, k - 1.0, k)
    return np.where(x - k * d < thr, k, k + 1.0)


def _last_above(x, thr, d):
    # largest integer k with x - k d > thr
    k = np.ceil((x - thr) / d) - 1.0
    k = np.where(x - (k + 1.0) * d > thr, k + 1.0, k)
    return np.where(x - k * d > thr, k, k - 1.0)


def soft_distance(a, b, p: SoftDistanceParams):
    """``delta * #{k : (a - k delta, b - k delta) in S^t}`` (strict inequalities).

    Threshold ``k delta`` counts when ``a`` sits below ``k delta - t`` and ``b``
    above ``k delta + t``, or the other way round.  Each way is an integer
    range, so the count is the size of their union.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d, t = p.delta, p.t
    lo1, hi1 = _first_below(a, -t, d), _last_above(b, t, d)
    lo2, hi2 = _first_below(b, -t, d), _last_above(a, t, d)
    def size(lo, hi):
        return np.maximum(hi - lo + 1.0, 0.0)

    both = size(np.maximum(lo1, lo2), np.minimum(hi1, hi2))
    return d * (size(lo1, hi1) + size(lo2, hi2) - both)


def soft_l1_distance(a, b, p: SoftDistanceParams) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.mean(soft_distance(a, b, p)))
