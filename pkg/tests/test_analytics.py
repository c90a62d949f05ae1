"""Closed-form results: inversion condition, sech/tanh pulse, chirp,
doublet rotation, linear-stage rates and the blocking threshold.

The pulse shape is pinned both by printed values and by the first-order
relations it must satisfy (checked with central differences); the
asymptotic growth rates are compared against the exact eigenvalues,
including their second-order convergence in 1/omega32.
"""

import numpy as np
import pytest

from filmsr import (DegenerateSolution, DomainViolation, NoInversion,
                    amplitude_ratio, analytic_chirp, critical_lfc,
                    degenerate_solution, initial_state, inversion_condition,
                    linear_rates, make_params, population_oscillation)

RNG = np.random.default_rng(17)
PARAMS = make_params(5.0, 0.0)


class TestInversionCondition:
    def test_pure_bright_doublet(self):
        out = inversion_condition(initial_state(0.5, 0.5, 0.5, 0.0, 0.0),
                                  PARAMS)
        assert out["Z0"] == pytest.approx(0.5)
        assert out["superradiant"] is True

    def test_ground_state_cannot_radiate(self):
        out = inversion_condition(initial_state(0.0, 0.0, 0.0, 0.0, 0.0),
                                  PARAMS)
        assert out["Z0"] == pytest.approx(-0.5)
        assert out["superradiant"] is False

    def test_partial_coherent_doublet(self):
        """rho22 = rho33 = rho32 = 0.3 against rho11 = 0.4: the bright
        population 0.3*(1 + 1) = 0.6 beats the ground one."""
        out = inversion_condition(initial_state(0.3, 0.3, 0.3, 0.0, 0.0),
                                  PARAMS)
        assert out["Z0"] == pytest.approx(0.1)
        assert out["superradiant"] is True

    def test_incoherent_equal_thirds_is_marginal(self):
        third = 1.0 / 3.0
        out = inversion_condition(initial_state(third, third, 0.0, 0.0, 0.0),
                                  PARAMS)
        assert out["Z0"] == pytest.approx(0.0, abs=1e-15)
        assert out["superradiant"] is False


class TestDegenerateSolution:
    SOL = degenerate_solution(0.5, np.sqrt(2.0) * 1e-8, 1.0)

    def test_delay_time(self):
        assert self.SOL.tau_R_prime == pytest.approx(0.5)
        assert self.SOL.t_D == pytest.approx(9.037, abs=1e-3)

    def test_pulse_peak_values(self):
        out = self.SOL.evaluate(self.SOL.t_D)
        assert out["Z"] == pytest.approx(0.0, abs=1e-15)
        assert out["R_plus_abs"] == pytest.approx(0.5)

    def test_inversion_fully_reverses(self):
        late = self.SOL.t_D + 50.0 * self.SOL.tau_R_prime
        out = self.SOL.evaluate(late)
        assert out["Z"] == pytest.approx(-0.5, abs=1e-12)
        assert out["R_plus_abs"] == pytest.approx(0.0, abs=1e-10)

    def test_phase_anchored_at_zero(self):
        assert self.SOL.evaluate(0.0)["phi"] == 0.0

    def test_energy_surface(self):
        """Z^2 + |R+1|^2 = Z0^2 along the whole pulse."""
        t = RNG.uniform(0.0, 2.0 * self.SOL.t_D, size=100)
        out = self.SOL.evaluate(t)
        np.testing.assert_allclose(out["Z"] ** 2 + out["R_plus_abs"] ** 2,
                                   0.25, atol=1e-12)

    def test_first_order_relations(self):
        """dZ/dt = -4|R+1|^2 and d|R+1|/dt = 4 Z |R+1|."""
        t = RNG.uniform(1.0, 2.0 * self.SOL.t_D, size=100)
        h = 1e-6
        lo, hi, mid = (self.SOL.evaluate(t - h), self.SOL.evaluate(t + h),
                       self.SOL.evaluate(t))
        dz = (hi["Z"] - lo["Z"]) / (2.0 * h)
        dr = (hi["R_plus_abs"] - lo["R_plus_abs"]) / (2.0 * h)
        np.testing.assert_allclose(dz, -4.0 * mid["R_plus_abs"] ** 2,
                                   rtol=1e-6, atol=1e-9)
        np.testing.assert_allclose(dr, 4.0 * mid["Z"] * mid["R_plus_abs"],
                                   rtol=1e-6, atol=1e-9)

    def test_phase_derivative_is_chirp(self):
        t = RNG.uniform(1.0, 2.0 * self.SOL.t_D, size=50)
        h = 1e-6
        dphi = (self.SOL.evaluate(t + h)["phi"]
                - self.SOL.evaluate(t - h)["phi"]) / (2.0 * h)
        np.testing.assert_allclose(
            dphi, analytic_chirp(0.5, 1.0, self.SOL.t_D, 0.5, t),
            rtol=1e-6, atol=1e-8)

    def test_two_level_correspondence(self):
        """The bright channel is a two-level emitter with half the time
        constant and twice the local-field strength: the pulse width is
        half of 1/(2 Z0), and the chirp saturates at (2 Z0)(2 delta_L)."""
        sol = degenerate_solution(0.5, 1e-6, 0.25)
        assert sol.tau_R_prime == pytest.approx(0.5 * (1.0 / (2.0 * 0.5)))
        late = sol.t_D + 60.0 * sol.tau_R_prime
        chirp = analytic_chirp(0.5, 0.25, sol.t_D, sol.tau_R_prime, late)
        assert chirp == pytest.approx((2.0 * 0.5) * (2.0 * 0.25), rel=1e-12)

    def test_rejects_no_inversion(self):
        with pytest.raises(NoInversion):
            degenerate_solution(0.0, 1e-8, 0.0)
        with pytest.raises(NoInversion):
            degenerate_solution(-0.1, 1e-8, 0.0)

    def test_rejects_large_seed(self):
        with pytest.raises(DomainViolation):
            degenerate_solution(0.5, 1e-3, 0.0)
        with pytest.raises(DomainViolation):
            degenerate_solution(0.5, 0.0, 0.0)


class TestAnalyticChirp:
    def test_zero_at_delay_time(self):
        assert analytic_chirp(0.5, 1.0, 9.0, 0.5, 9.0) == 0.0

    def test_saturation_limits(self):
        assert analytic_chirp(0.5, 1.0, 9.0, 0.5, 9.0 + 30.0) == pytest.approx(2.0)
        assert analytic_chirp(0.5, 1.0, 9.0, 0.5, 9.0 - 9.0) == pytest.approx(
            -2.0, rel=1e-12)

    def test_no_lfc_means_no_chirp(self):
        t = np.linspace(0.0, 20.0, 101)
        np.testing.assert_array_equal(analytic_chirp(0.5, 0.0, 9.0, 0.5, t),
                                      0.0)

    def test_antisymmetric_about_delay(self):
        dt = np.linspace(0.1, 5.0, 25)
        up = analytic_chirp(0.5, 0.7, 9.0, 0.5, 9.0 + dt)
        dn = analytic_chirp(0.5, 0.7, 9.0, 0.5, 9.0 - dt)
        np.testing.assert_allclose(up, -dn, rtol=1e-14)


class TestPopulationOscillation:
    def test_half_period_flips_both(self):
        y, z = population_oscillation(0.0, 1.0, 2.0, np.pi / 2.0)
        assert y == pytest.approx(0.0, abs=1e-12)
        assert z == pytest.approx(-1.0)

    def test_quarter_period_swaps(self):
        y, z = population_oscillation(0.0, 1.0, 2.0, np.pi / 4.0)
        assert y == pytest.approx(-1.0)
        assert z == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_doublet_is_static(self):
        t = np.linspace(0.0, 50.0, 11)
        y, z = population_oscillation(0.3, -0.4, 0.0, t)
        np.testing.assert_array_equal(y, 0.3)
        np.testing.assert_array_equal(z, -0.4)

    def test_norm_conserved(self):
        t = RNG.uniform(0.0, 100.0, size=64)
        for _ in range(20):
            y0, z0 = RNG.uniform(-0.7, 0.7, size=2)
            y, z = population_oscillation(y0, z0, 5.0, t)
            np.testing.assert_allclose(y * y + z * z, y0 * y0 + z0 * z0,
                                       atol=1e-12)

    def test_rejects_outside_unit_disc(self):
        with pytest.raises(DomainViolation):
            population_oscillation(0.8, 0.7, 5.0, 0.0)


class TestLinearRates:
    def test_symmetric_growth_without_lfc(self):
        rates = linear_rates(make_params(5.0, 0.0), 0.5)
        assert rates.lambda1 == pytest.approx(0.5 + 2.5j)
        assert rates.lambda2 == pytest.approx(0.5 - 2.5j)

    def test_growth_gap(self):
        """Re(lambda2) - Re(lambda1) = 4 W^2 delta_L / omega32."""
        rates = linear_rates(make_params(5.0, 1.0 / 7.0), 0.5)
        assert rates.lambda2.real - rates.lambda1.real == pytest.approx(
            1.0 / 35.0, rel=1e-12)

    def test_asymptotic_matches_exact_at_large_splitting(self):
        rates = linear_rates(make_params(100.0, 0.1), 0.5)
        assert abs(rates.exact1 - rates.lambda1) / abs(rates.exact1) < 1e-3
        assert abs(rates.exact2 - rates.lambda2) / abs(rates.exact2) < 1e-3

    def test_exact_pairing(self):
        rates = linear_rates(make_params(20.0, 0.3), 0.5)
        assert abs(rates.exact1 - rates.lambda1) < abs(rates.exact1
                                                       - rates.lambda2)
        assert rates.exact1.imag > 0 > rates.exact2.imag

    def test_second_order_convergence(self):
        """Relative error of the printed form falls off as omega32^-2."""
        oms = np.array([50.0, 100.0, 200.0, 400.0])
        errs = []
        for om in oms:
            rates = linear_rates(make_params(om, 0.3), 0.5)
            errs.append(abs(rates.exact1 - rates.lambda1) / abs(rates.exact1))
        slope = np.polyfit(np.log(oms), np.log(errs), 1)[0]
        assert slope == pytest.approx(-2.0, abs=0.1)

    def test_rejects_unbalanced_moments(self):
        with pytest.raises(DomainViolation):
            linear_rates(make_params(5.0, 0.0, 1.2, np.sqrt(2.0 - 1.44)), 0.5)

    def test_rejects_bad_inversion(self):
        with pytest.raises(DomainViolation):
            linear_rates(PARAMS, 0.0)
        with pytest.raises(DomainViolation):
            linear_rates(PARAMS, 0.6)

    def test_rejects_degenerate_doublet(self):
        with pytest.raises(DomainViolation):
            linear_rates(make_params(0.0, 0.1), 0.5)


class TestAmplitudeRatio:
    def test_reaches_e_at_critical_product(self):
        """With delta_L = delta_L_c the ratio hits e exactly at t_D."""
        assert amplitude_ratio(make_params(5.0, 1.0 / 7.0), 0.5,
                               35.0) == pytest.approx(np.e, rel=1e-12)

    def test_one_without_lfc(self):
        assert amplitude_ratio(make_params(5.0, 0.0), 0.5, 35.0) == 1.0

    def test_one_at_start(self):
        assert amplitude_ratio(make_params(5.0, 0.9), 0.5, 0.0) == 1.0


class TestCriticalLfc:
    def test_printed_value(self):
        assert critical_lfc(5.0, 0.5, 35.0) == pytest.approx(1.0 / 7.0,
                                                             rel=1e-14)

    def test_scales_inversely_with_delay(self):
        assert critical_lfc(5.0, 0.5, 70.0) == pytest.approx(
            0.5 * critical_lfc(5.0, 0.5, 35.0))

    def test_scales_inversely_with_inversion_squared(self):
        assert critical_lfc(5.0, 0.25, 35.0) == pytest.approx(
            4.0 * critical_lfc(5.0, 0.5, 35.0))

    def test_rejects_nonpositive_inputs(self):
        for args in ((0.0, 0.5, 35.0), (5.0, 0.0, 35.0), (5.0, 0.5, 0.0)):
            with pytest.raises(DomainViolation):
                critical_lfc(*args)
