import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qeclipse.bounds import (
    BoundConfig,
    FixedPointError,
    ball_width_bound,
    prop1_m,
    prop2_map,
    prop2_m,
)
from qeclipse.geometry import DifferenceBall


def scan_fixed_point(w, n, delta, sigma, r, eta, c2=1.0, cap=None, limit=10**5):
    """Smallest m in [1, limit] with ceil(F(m)) == m, by exhaustive evaluation."""
    m = np.arange(1, limit + 1, dtype=float)
    ratio = r * m / (delta * n)
    if cap is not None:
        ratio = np.minimum(ratio, cap)
    f = c2 * (w * w + n * delta * delta / sigma**2) * (1 + np.log1p(ratio) + math.log(1 / eta) / w**2)
    vals = np.maximum(1, np.ceil(f - 1e-12 * np.maximum(1, np.abs(f))))
    hits = np.flatnonzero(vals == m)
    return int(m[hits[0]]) if hits.size else None


class TestProp1:
    def test_hand_value(self):
        assert prop1_m(1.0, math.exp(-2.0)) == 10

    def test_plus_one_dominates(self):
        assert prop1_m(0.001, 0.9999) == 2

    def test_constant_scales(self):
        for w, eta in [(0.5, 0.1), (2.0, 0.01), (3.3, 0.5)]:
            base = prop1_m(w, eta)
            doubled = prop1_m(w, eta, BoundConfig(c1_const=2.0))
            assert 2 * base - 2 <= doubled <= 2 * base

    @pytest.mark.parametrize("w, eta", [(0.0, 0.1), (-1.0, 0.1), (1.0, 0.0), (1.0, 1.0)])
    def test_rejects(self, w, eta):
        with pytest.raises(ValueError):
            prop1_m(w, eta)


class TestProp2:
    def test_worked_example(self):
        got = prop2_m(1.0, 64, 1.0, 1.0, 1.0, math.exp(-1.0))
        assert got == scan_fixed_point(1.0, 64, 1.0, 1.0, 1.0, math.exp(-1.0))
        # the map reduces to ceil(65 (2 + ln(1 + m/64)))
        assert got == math.ceil(65 * (2 + math.log1p(got / 64)))

    def test_vanishing_resolution_diverges(self):
        args = dict(w=4.0, n=64, sigma=64.0, r=2.0, eta=0.1)
        assert prop2_m(delta=1e-9, **args) > prop2_m(delta=1.0, **args)

    def test_nonincreasing_in_sigma(self):
        for w in (0.5, 2.0):
            vals = [prop2_m(w, 32, 1.0, s, 2.0, 0.1) for s in (0.5, 1, 2, 4, 8, 16, 64)]
            assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_nondecreasing_in_delta_when_quantisation_dominates(self):
        # with n delta^2 / sigma^2 >= w^2 the rate term outgrows the shrinking log
        w, n, sigma = 1.0, 32, 4.0
        deltas = [d for d in (0.75, 1.0, 2.0, 4.0, 8.0, 32.0) if n * d * d / sigma**2 >= w * w]
        vals = [prop2_m(w, n, d, sigma, 2.0, 0.1) for d in deltas]
        assert len(vals) >= 4
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    @settings(max_examples=80, deadline=None)
    @given(
        st.floats(0.1, 8),
        st.integers(1, 256),
        st.floats(0.05, 20),
        st.floats(0.05, 200),
        st.floats(0.1, 10),
        st.floats(0.001, 0.99),
    )
    def test_fixed_point_properties(self, w, n, delta, sigma, r, eta):
        try:
            m = prop2_m(w, n, delta, sigma, r, eta)
        except FixedPointError:
            return
        assert prop2_map(m, w, n, delta, sigma, r, eta) == m
        # nothing smaller is self-consistent, and iterates climb monotonically
        prev, x = 0, 1
        while x != m:
            assert x >= prev
            prev, x = x, prop2_map(x, w, n, delta, sigma, r, eta)
        if m <= 10**5:
            assert m == scan_fixed_point(w, n, delta, sigma, r, eta)

    def test_cap_freezes_log(self):
        free = prop2_m(1.0, 64, 1e-6, 8.0, 2.0, 0.1)
        capped = prop2_m(1.0, 64, 1e-6, 8.0, 2.0, 0.1, log_arg_cap=1e6)
        assert capped <= free
        assert capped == scan_fixed_point(1.0, 64, 1e-6, 8.0, 2.0, 0.1, cap=1e6)

    def test_iteration_cap(self):
        with pytest.raises(FixedPointError):
            prop2_m(1.0, 64, 1.0, 1.0, 1.0, 0.1, BoundConfig(max_fixed_point_iters=1))

    @pytest.mark.parametrize("field", ["w", "n", "delta", "sigma", "r"])
    def test_rejects_nonpositive(self, field):
        args = dict(w=1.0, n=8, delta=1.0, sigma=1.0, r=1.0, eta=0.1)
        args[field] = 0
        with pytest.raises(ValueError):
            prop2_m(**args)

    def test_bad_config(self):
        with pytest.raises(ValueError):
            BoundConfig(c2_const=0.0)


class TestWidthBound:
    def test_unit(self):
        assert ball_width_bound(DifferenceBall([2.0, 0.0, 0.0, 0.0], 1.0)) == pytest.approx(1.0)

    def test_scale_free(self):
        d = DifferenceBall([3.0, -1.0, 2.0], 1.3)
        for alpha in (1e-3, 0.7, 42.0):
            assert ball_width_bound(DifferenceBall(alpha * d.c, alpha * d.r)) == pytest.approx(ball_width_bound(d))

    def test_arithmetic(self):
        assert ball_width_bound(DifferenceBall([10.0] + [0.0] * 63, 2.0)) == pytest.approx(1.6)
