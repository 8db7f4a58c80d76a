import math

import numpy as np
import pytest

from angulab import specfun
from angulab.specfun import (
    gauss_hermite,
    gauss_legendre,
    hermite_function,
    hermite_polynomial,
    periodic_trapezoid,
    spherical_harmonic,
    theta_lm,
)


def hermite_by_series(n, x):
    """Independent oracle: explicit coefficient sum for H_n."""
    total = 0.0
    for k in range(n // 2 + 1):
        total += (
            (-1) ** k
            / (math.factorial(k) * math.factorial(n - 2 * k))
            * (2.0 * x) ** (n - 2 * k)
        )
    return math.factorial(n) * total


class TestHermitePolynomial:
    def test_low_orders(self):
        assert hermite_polynomial(0, 0.7) == 1.0
        assert hermite_polynomial(1, 0.5) == 1.0
        # H_3(x) = 8 x^3 - 12 x
        assert hermite_polynomial(3, 1.0) == pytest.approx(-4.0, abs=1e-12)

    @pytest.mark.parametrize("n", range(11))
    def test_recurrence_matches_series(self, n):
        for x in np.linspace(-5.0, 5.0, 21):
            ref = hermite_by_series(n, x)
            got = hermite_polynomial(n, x)
            assert got == pytest.approx(ref, rel=1e-9, abs=1e-9)

    def test_supports_n_50(self):
        val = hermite_polynomial(50, 1.3)
        assert np.isfinite(val)

    def test_range_error(self):
        with pytest.raises(ValueError):
            hermite_polynomial(1000, 0.1)
        with pytest.raises(ValueError):
            hermite_polynomial(-1, 0.1)


class TestHermiteFunction:
    def test_ground_state_origin(self):
        # normalization integral of exp(-xi^2) is sqrt(pi)
        assert hermite_function(0, 0.0) == pytest.approx(np.pi ** -0.25, abs=1e-12)

    def test_odd_function_origin(self):
        assert hermite_function(1, 0.0) == 0.0

    def test_orthogonality_h2_h3(self):
        rule = gauss_hermite(64)
        wt = rule.weights * np.exp(rule.nodes**2)
        val = np.sum(wt * hermite_function(2, rule.nodes) * hermite_function(3, rule.nodes))
        assert abs(val) < 1e-10

    def test_orthonormal_gram(self):
        rule = gauss_hermite(64)
        wt = rule.weights * np.exp(rule.nodes**2)
        table = specfun.hermite_function_table(8, rule.nodes)
        gram = (table * wt) @ table.T
        assert np.max(np.abs(gram - np.eye(9))) < 1e-9

    def test_large_n_stays_finite(self):
        assert np.isfinite(hermite_function(120, 3.0))


class TestTheta:
    def test_theta_00(self):
        for theta in (0.1, 1.0, 2.5):
            assert theta_lm(0, 0, theta) == pytest.approx(1 / np.sqrt(2), abs=1e-14)

    def test_theta_10_node(self):
        assert theta_lm(1, 0, np.pi / 2) == pytest.approx(0.0, abs=1e-14)

    def test_closed_forms(self):
        th = 0.83
        assert theta_lm(1, 1, th) == pytest.approx(-np.sqrt(3.0) / 2 * np.sin(th), rel=1e-12)
        assert theta_lm(2, 1, th) == pytest.approx(
            -np.sqrt(15.0) / 2 * np.sin(th) * np.cos(th), rel=1e-12
        )

    def test_negative_m_sign(self):
        th = 1.2
        assert theta_lm(1, -1, th) == pytest.approx(-theta_lm(1, 1, th), rel=1e-12)
        assert theta_lm(2, -2, th) == pytest.approx(theta_lm(2, 2, th), rel=1e-12)

    def test_normalization_quadrature(self):
        rule = gauss_legendre(64)
        theta = np.arccos(rule.nodes)
        val = np.sum(rule.weights * theta_lm(2, 1, theta) ** 2)
        assert val == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("l", [0, 1, 2, 3, 4])
    def test_orthonormal_gram_fixed_l(self, l):
        rule = gauss_legendre(64)
        theta = np.arccos(rule.nodes)
        table = specfun.theta_lm_table(l, theta)
        gram = (table * rule.weights) @ table.T
        # theta factors with m of equal sign-structure overlap off the
        # diagonal only through +-m pairs; same-|m| entries must be +-1
        for i in range(2 * l + 1):
            assert gram[i, i] == pytest.approx(1.0, abs=1e-9)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            theta_lm(1, 2, 0.3)


class TestSphericalHarmonic:
    def test_y00(self):
        assert spherical_harmonic(0, 0, 0.4, 1.1) == pytest.approx(
            1 / np.sqrt(4 * np.pi), abs=1e-12
        )

    def test_azimuthal_phase(self):
        a = spherical_harmonic(1, 1, np.pi / 2, 0.0)
        b = spherical_harmonic(1, 1, np.pi / 2, np.pi)
        assert b == pytest.approx(-a, rel=1e-12)

    def test_unit_norm_y21(self):
        theta_rule = gauss_legendre(64)
        phi_rule = periodic_trapezoid(256)
        theta = np.arccos(theta_rule.nodes)
        vals = spherical_harmonic(2, 1, theta[:, None], phi_rule.nodes[None, :])
        total = np.sum(
            theta_rule.weights[:, None] * phi_rule.weights[None, :] * np.abs(vals) ** 2
        )
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_fourier_orthonormality(self):
        rule = periodic_trapezoid(256)
        modes = np.exp(1j * np.arange(-8, 9)[:, None] * rule.nodes[None, :]) / np.sqrt(
            2 * np.pi
        )
        gram = (modes * rule.weights) @ modes.conj().T
        assert np.max(np.abs(gram - np.eye(17))) < 1e-9


class TestQuadratureRules:
    def test_gauss_legendre_2(self):
        rule = gauss_legendre(2)
        assert rule.nodes == pytest.approx([-1 / np.sqrt(3), 1 / np.sqrt(3)], abs=1e-14)
        assert rule.weights == pytest.approx([1.0, 1.0], abs=1e-14)
        assert np.sum(rule.weights * rule.nodes**2) == pytest.approx(2 / 3, abs=1e-14)

    def test_gauss_legendre_weight_sum(self):
        for n in (2, 5, 16, 64):
            rule = gauss_legendre(n)
            assert len(rule.nodes) == len(rule.weights) == n
            assert np.all(rule.weights > 0)
            assert np.sum(rule.weights) == pytest.approx(2.0, rel=1e-12)

    def test_gauss_hermite_moment(self):
        rule = gauss_hermite(40)
        val = np.sum(rule.weights * rule.nodes**2)
        assert val == pytest.approx(np.sqrt(np.pi) / 2, abs=1e-12)

    def test_periodic_trapezoid_measure(self):
        rule = periodic_trapezoid(4)
        assert np.sum(rule.weights) == pytest.approx(2 * np.pi, rel=1e-14)
        assert np.all(rule.weights > 0)

    def test_degenerate_rejected(self):
        for ctor in (gauss_legendre, gauss_hermite, periodic_trapezoid):
            with pytest.raises(ValueError):
                ctor(1)

    def test_convergence_until_small(self):
        # smooth integrand on [-1, 1]; doubling n shrinks the error
        # monotonically until it is quadrature-exact
        target = np.sin(1.0) - np.sin(-1.0)
        errors = []
        for n in (2, 4, 8, 16, 32):
            rule = gauss_legendre(n)
            errors.append(abs(np.sum(rule.weights * np.cos(rule.nodes)) - target))
        for a, b in zip(errors, errors[1:]):
            assert b <= a or b < 1e-10
        assert errors[-1] < 1e-10
