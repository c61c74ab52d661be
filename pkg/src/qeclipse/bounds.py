"""Sample-complexity evaluators for the linear and quantised eclipse problems.

The underlying statements hold up to unspecified constants; here those
constants are explicit knobs (``BoundConfig``) defaulting to 1, so only
relative trends of the outputs carry meaning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qeclipse.geometry import DifferenceBall


class FixedPointError(RuntimeError):
    """The implicit quantised bound did not settle within the iteration cap."""


@dataclass(frozen=True)
class BoundConfig:
    c1_const: float = 1.0
    c2_const: float = 1.0
    max_fixed_point_iters: int = 100

    def __post_init__(self):
        if not (self.c1_const > 0 and self.c2_const > 0 and self.max_fixed_point_iters > 0):
            raise ValueError("bound constants and iteration cap must be positive")


def _ceil(x: float) -> int:
    # values within 1e-12 (relative) above an integer count as that integer
    return int(math.ceil(x - 1e-12 * max(1.0, abs(x))))


def _check_eta(eta: float):
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")


def prop1_m(w: float, eta: float, cfg: BoundConfig = BoundConfig()) -> int:
    """``ceil(C1 ((w + sqrt(2 ln(1/eta)))^2 + 1))`` measurements for the linear problem."""
    if not w > 0:
        raise ValueError(f"width must be positive, got {w}")
    _check_eta(eta)
    return _ceil(cfg.c1_const * ((w + math.sqrt(2.0 * math.log(1.0 / eta))) ** 2 + 1.0))


def prop2_map(m, w, n, delta, sigma, r, eta, cfg: BoundConfig = BoundConfig(), log_arg_cap=None) -> int:
    """Right-hand side of the implicit quantised bound, evaluated at ``m``."""
    ratio = r * m / (delta * n)
    if log_arg_cap is not None:
        ratio = min(ratio, log_arg_cap)
    rate = w * w + n * delta * delta / (sigma * sigma)
    value = cfg.c2_const * rate * (1.0 + math.log1p(ratio) + math.log(1.0 / eta) / (w * w))
    return max(1, _ceil(value))


def prop2_m(
    w: float,
    n: int,
    delta: float,
    sigma: float,
    r: float,
    eta: float,
    cfg: BoundConfig = BoundConfig(),
    log_arg_cap: float | None = None,
) -> int:
    """Smallest self-consistent ``m`` for the quantised bound.

    ``m`` appears on both sides (inside ``log(1 + r m / (delta n))``), so the
    map ``m -> ceil(...)`` is iterated from ``m = 1``.  The map is
    nondecreasing, hence the iterates increase monotonically to its smallest
    fixed point.  ``log_arg_cap`` optionally freezes the log argument.
    """
    for name, value in (("w", w), ("n", n), ("delta", delta), ("sigma", sigma), ("r", r)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    _check_eta(eta)
    m = 1
    for _ in range(cfg.max_fixed_point_iters):
        nxt = prop2_map(m, w, n, delta, sigma, r, eta, cfg, log_arg_cap)
        if nxt == m:
            return m
        m = nxt
    raise FixedPointError(
        f"no fixed point after {cfg.max_fixed_point_iters} iterations (last m = {m})"
    )


def ball_width_bound(d: DifferenceBall) -> float:
    """Constant-free width scale ``(r / ||c||) sqrt(n)`` of a difference ball."""
    return d.r / d.norm_c * float(np.sqrt(d.n))
