import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpq2.core import (
    Exponent,
    LpVector,
    R_INFINITY,
    curve_norm_power,
    curve_taylor,
    curve_through,
    duality_map,
    lp_norm,
    rotate,
)
from lpq2.fdcheck import taylor_by_differences

from oracles import mp_lp_norm

exponents = st.floats(min_value=1.05, max_value=8.0)


class TestExponent:
    def test_bounds_rejected(self):
        with pytest.raises(ValueError):
            Exponent(1.0)
        with pytest.raises(ValueError):
            Exponent(1.04)
        with pytest.raises(ValueError):
            Exponent(65.0)
        with pytest.raises(ValueError):
            Exponent(float("inf"))

    @given(exponents)
    @settings(max_examples=50, deadline=None)
    def test_conjugate_identity(self, p):
        e = Exponent(p)
        assert abs(1.0 / e.value + 1.0 / e.conjugate.value - 1.0) <= 1e-14

    def test_is_two(self):
        assert Exponent(2.0).is_two
        assert not Exponent(2.1).is_two


class TestNorm:
    def test_axis(self):
        assert lp_norm(1.0, 0.0, Exponent(3)) == 1.0

    def test_symmetric(self):
        assert abs(lp_norm(1.0, 1.0, Exponent(2)) - math.sqrt(2.0)) <= 1e-15

    def test_high_precision(self):
        got = lp_norm(0.8, 0.6, Exponent(4))
        want = mp_lp_norm(0.8, 0.6, 4)
        assert abs(got - want) <= 1e-15 * want

    # Magnitudes where the naive sum cannot underflow; the factored form in
    # lp_norm is exactly what protects the extreme ranges.
    @given(exponents, st.floats(0.001, 5.0), st.floats(0.001, 5.0),
           st.sampled_from([1.0, -1.0]), st.sampled_from([1.0, -1.0]))
    @settings(max_examples=50, deadline=None)
    def test_matches_direct_sum(self, p, a, b, sa, sb):
        got = lp_norm(sa * a, sb * b, Exponent(p))
        want = (abs(a) ** p + abs(b) ** p) ** (1.0 / p)
        assert got == pytest.approx(want, rel=1e-13)


class TestDualityMap:
    def test_axis_fixed_point(self):
        for p in (1.5, 2.0, 3.0, 7.0):
            d = duality_map(LpVector(1.0, 0.0, p))
            assert d.coords() == (1.0, 0.0)
            assert d.exponent.value == pytest.approx(p / (p - 1.0))

    def test_symmetric_point(self):
        for p in (1.5, 3.0, 4.0):
            c = 2.0 ** (-1.0 / p)
            x = LpVector(c, c, p)
            d = duality_map(x)
            want = 2.0 ** (-(p - 1.0) / p)
            assert d.x1 == pytest.approx(want, rel=1e-14)
            assert d.x1 * x.x1 + d.x2 * x.x2 == pytest.approx(1.0, abs=1e-14)
            assert d.norm() == pytest.approx(1.0, abs=1e-14)

    def test_self_dual_at_two(self):
        x = LpVector.unit(0.3, -0.8, 2)
        d = duality_map(x)
        assert d.x1 == pytest.approx(x.x1, abs=1e-15)
        assert d.x2 == pytest.approx(x.x2, abs=1e-15)

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            duality_map(LpVector(0.5, 0.1, 3))

    def test_orthogonality_of_dual_pair(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            p = float(rng.uniform(1.1, 8.0))
            x = LpVector.unit(float(rng.normal()), float(rng.normal()), p)
            d = duality_map(x)
            rd = duality_map(LpVector.unit(-x.x2, x.x1, p))
            assert abs(d.x1 * rd.x1 + d.x2 * rd.x2) <= 1e-12

    def test_rotated_pairing_is_one(self):
        rng = np.random.default_rng(6)
        for _ in range(40):
            p = float(rng.uniform(1.1, 8.0))
            x = LpVector.unit(float(rng.normal()), float(rng.normal()), p)
            xo = rotate(x)
            d = duality_map(xo)
            assert xo.x1 * d.x1 + xo.x2 * d.x2 == pytest.approx(1.0, abs=1e-12)


class TestRotate:
    def test_axes(self):
        assert rotate(LpVector(1.0, 0.0, 3)).coords() == (0.0, 1.0)
        assert rotate(LpVector(0.0, 1.0, 3)).coords() == (-1.0, 0.0)

    @given(st.floats(-3, 3), st.floats(-3, 3))
    @settings(max_examples=40, deadline=None)
    def test_half_turn(self, a, b):
        x = LpVector(a, b, 2.5)
        y = rotate(rotate(x))
        assert (y.x1, y.x2) == (-a, -b)


class TestCurve:
    def test_at_zero(self):
        x = LpVector.unit(0.6, 0.8, 2)
        assert curve_through(x, 0.0).coords() == x.coords()

    def test_axis_rotation(self):
        got = curve_through(LpVector(1.0, 0.0, 2), 1.0)
        assert got.coords() == (1.0, 1.0)

    def test_infinite_parameter(self):
        x = LpVector.unit(0.6, 0.8, 3)
        lim = curve_through(x, R_INFINITY)
        d = duality_map(LpVector.unit(-x.x2, x.x1, 3))
        assert lim.x1 == pytest.approx(d.x1, abs=1e-15)
        assert lim.x2 == pytest.approx(d.x2, abs=1e-15)
        assert curve_through(x, math.inf).coords() == lim.coords()

    def test_norm_power_at_zero(self):
        x = LpVector.unit(0.6, 0.8, 2.7)
        assert curve_norm_power(x, 0.0) == pytest.approx(1.0, abs=1e-14)

    def test_flat_cases(self):
        # Exponent two or an axis vector: 1 + |r|^p exactly.
        for x, p in ((LpVector.unit(0.6, -0.8, 2), 2.0), (LpVector(1.0, 0.0, 3), 3.0)):
            for r in (-2.0, -0.5, 0.3, 4.0):
                assert curve_norm_power(x, r) == pytest.approx(
                    1.0 + abs(r) ** p, rel=1e-14
                )

    def test_compositional(self):
        x = LpVector.unit(2 ** (-1 / 3), 2 ** (-1 / 3), 3)
        r = 0.5
        pt = curve_through(x, r)
        assert curve_norm_power(x, r) == pytest.approx(pt.norm() ** 3, rel=1e-13)

    def test_power_consistency(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            p = float(rng.uniform(1.2, 6.0))
            q = float(rng.uniform(1.2, 6.0))
            x = LpVector.from_mass(float(rng.uniform(0.3, 0.9)), p)
            r = float(rng.uniform(-3, 3))
            f = curve_norm_power(x, r)
            h = curve_norm_power(x, r, q)
            assert h == pytest.approx(f ** (q / p), rel=1e-13)

    def test_monotone_in_r(self):
        rng = np.random.default_rng(8)
        grid = np.concatenate([np.logspace(-4, 4, 200)])
        for _ in range(10):
            p = float(rng.uniform(1.2, 6.0))
            x = LpVector.from_mass(float(rng.uniform(0.5, 0.95)), p)
            up = np.asarray(curve_norm_power(x, grid))
            dn = np.asarray(curve_norm_power(x, -grid))
            assert np.all(np.diff(up) > 0.0)
            assert np.all(np.diff(dn) > 0.0)
            assert up.min() > 1.0 and dn.min() > 1.0

    def test_vectorized_matches_scalar(self):
        x = LpVector.from_mass(0.7, 2.4)
        rs = np.array([-2.0, -0.1, 0.3, 5.0])
        vec = curve_norm_power(x, rs)
        for r, v in zip(rs, vec):
            assert curve_norm_power(x, float(r)) == pytest.approx(float(v), rel=1e-15)


class TestTaylor:
    def test_leading_terms(self):
        x = LpVector.from_mass(0.7, 3)
        tc = curve_taylor(x)
        assert tc.c0 == 1.0 and tc.c1 == 0.0

    def test_symmetric_third_order_vanishes(self):
        for p in (1.5, 3.0, 4.5):
            x = LpVector.from_mass(0.5, p)
            assert curve_taylor(x).c3 == pytest.approx(0.0, abs=1e-14)

    def test_rejects_axis(self):
        with pytest.raises(ValueError):
            curve_taylor(LpVector(1.0, 0.0, 3))

    def test_against_finite_differences(self):
        p, q = 3.0, 1.5
        x = LpVector(0.9 ** (1 / 3), 0.1 ** (1 / 3), p)
        for power in (p, q):
            closed = curve_taylor(x, power).as_tuple()
            fd = taylor_by_differences(lambda r: curve_norm_power(x, r, power))
            for c, d in zip(closed, fd):
                assert abs(c - d) <= 1e-5 * max(1.0, abs(c))

    def test_fd_sample(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            p = float(rng.uniform(1.3, 5.0))
            q = float(rng.uniform(1.3, 5.0))
            x = LpVector.from_mass(float(rng.uniform(0.3, 0.7)), p)
            closed = curve_taylor(x, q).as_tuple()
            fd = taylor_by_differences(lambda r: curve_norm_power(x, r, q))
            for c, d in zip(closed, fd):
                assert abs(c - d) <= 1e-5 * max(1.0, abs(c))
