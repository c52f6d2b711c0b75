"""Bessel J of real order: values, derivatives, zeros.

Reference values come from mpmath's multiprecision series at test time,
and zeros of integer order are cross-checked against scipy; both are
independent of the quadrature-based implementation under test.
"""

import mpmath
import numpy as np
import pytest
import scipy.special as sp

from conetrace.besselj import (
    bessel_j,
    bessel_j_pair,
    bessel_j_prime,
    bessel_j_zeros,
)
from conetrace.errors import BesselFailureError

mpmath.mp.dps = 30

# 20 (order, argument) pairs spanning series and integral regimes,
# including order >> argument and argument >> order
REFERENCE_POINTS = [
    (0.0, 0.5), (0.0, 12.0), (0.5, 1.0), (0.5, 30.0),
    (1.0, 3.0), (4.0 / 3.0, 0.7), (4.0 / 3.0, 25.0), (2.5, 2.5),
    (3.0, 80.0), (5.0, 0.1), (7.5, 7.5), (10.0, 4.0),
    (10.0, 40.0), (20.5, 22.0), (33.0, 100.0), (50.0, 45.0),
    (66.7, 70.0), (80.0, 200.0), (120.0, 130.0), (146.0, 390.0),
]


class TestValues:
    @pytest.mark.parametrize("nu,x", REFERENCE_POINTS)
    def test_against_multiprecision(self, nu, x):
        ref = float(mpmath.besselj(nu, x))
        got = bessel_j(nu, x)
        assert got == pytest.approx(ref, abs=1e-10, rel=1e-9)

    @pytest.mark.parametrize("nu,x", REFERENCE_POINTS[::3])
    def test_derivative_against_multiprecision(self, nu, x):
        ref = float(mpmath.besselj(nu, x, derivative=1))
        assert bessel_j_prime(nu, x) == pytest.approx(ref, abs=1e-10, rel=1e-9)

    def test_pair_matches_separate_calls(self):
        xs = np.linspace(0.1, 60.0, 40)
        j, jp = bessel_j_pair(4.0 / 3.0, xs)
        assert np.allclose(j, bessel_j(4.0 / 3.0, xs), rtol=0, atol=1e-14)
        assert np.allclose(jp, bessel_j_prime(4.0 / 3.0, xs), rtol=0, atol=1e-14)

    def test_special_values_at_zero(self):
        assert bessel_j(0.0, 0.0) == 1.0
        assert bessel_j(2.0, 0.0) == 0.0
        assert bessel_j_prime(1.0, 0.0) == 0.5

    def test_vectorized_matches_scalar(self):
        # node counts adapt to the largest argument in the batch, so the
        # agreement is to quadrature accuracy rather than bit-exact
        xs = np.array([0.3, 5.0, 17.0, 120.0])
        vec = bessel_j(2.5, xs)
        assert np.allclose(vec, [bessel_j(2.5, float(x)) for x in xs],
                           rtol=0, atol=1e-12)

    def test_domain_guards(self):
        with pytest.raises(BesselFailureError):
            bessel_j(-0.5, 1.0)
        with pytest.raises(BesselFailureError):
            bessel_j(1.0, -2.0)


class TestZeros:
    def test_integer_order_against_scipy(self):
        for nu in (0, 1, 5):
            got = bessel_j_zeros(float(nu), 80.0)
            ref = sp.jn_zeros(nu, len(got))
            assert np.max(np.abs(got - ref)) < 1e-9

    def test_real_order_residuals_and_interlacing(self):
        for nu in (4.0 / 3.0, 8.0 / 3.0, 20.7):
            zs = bessel_j_zeros(nu, 120.0)
            assert len(zs) > 10
            assert np.max(np.abs(bessel_j(nu, zs))) < 1e-9
            gaps = np.diff(zs)
            # spacing approaches pi from above, never dips below pi/2
            assert np.all(gaps > np.pi / 2)
            assert abs(gaps[-1] - np.pi) < 0.1

    def test_first_zero_exceeds_order(self):
        zs = bessel_j_zeros(7.5, 60.0)
        assert zs[0] > 7.5

    def test_empty_below_order(self):
        assert len(bessel_j_zeros(50.0, 40.0)) == 0

    def test_against_multiprecision_zero(self):
        ref = float(mpmath.besseljzero(3, 5))
        zs = bessel_j_zeros(3.0, 30.0)
        assert zs[4] == pytest.approx(ref, abs=1e-9)
