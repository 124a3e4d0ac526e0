import math
import unittest

import numpy as np

from modgrav.chameleon import (
    ChameleonModel,
    SphereBody,
    background_state,
    effective_yukawa,
    screening_radius,
)
from modgrav.exceptions import DomainError
from modgrav.forces import (
    ExperimentSetup,
    casimir_acceleration,
    casimir_force,
    form_factors,
    linearized_coefficients,
    newtonian_acceleration,
    retarded_time,
    source_position,
    total_force,
)
from modgrav.units import CONSTANTS


def table_setup(**changes) -> ExperimentSetup:
    params = dict(
        x0=1e-3,
        epsilon=0.1,
        omega0=2 * math.pi * 100,
        phi0=math.pi,
        source=SphereBody.from_any(mass=1e-6, density=19.3e3),
        probe=SphereBody.from_any(mass=1e-14, density=1538.0),
        rho_bg=8.27e-14,
    )
    params.update(changes)
    return ExperimentSetup(**params)


class Setup(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(DomainError):
            table_setup(epsilon=1.5)
        with self.assertRaises(DomainError):
            table_setup(epsilon=0.0)
        with self.assertRaises(DomainError):
            table_setup(x0=2.4e-4)

    def test_newtonian(self):
        setup = table_setup()
        self.assertAlmostEqual(newtonian_acceleration(setup) / 6.674e-11, 1.0, delta=1e-3)
        self.assertAlmostEqual(source_position(setup, 0.0), 1.1e-3, delta=1e-15)


class FormFactors(unittest.TestCase):
    def test_point_limit(self):
        self.assertEqual(tuple(form_factors(0.0, 1.0)), (1.0, 0.0, 1.0))

    def test_reference_value(self):
        self.assertAlmostEqual(form_factors(1.0, 1.0).f, 1.271, delta=1e-3)

    def test_identity(self):
        for u in (1e-7, 5e-5, 1e-4, 0.3, 0.99, 1.0, 5.0, 50.0):
            A, B, _ = form_factors(u, 2.0)
            self.assertAlmostEqual(
                (A + B) / ((1 + u) * math.exp(-u) * math.cosh(u)), 1.0, delta=1e-12
            )

    def test_branches_agree(self):
        below = form_factors(1e-4 * (1 - 1e-9), 1.0)
        above = form_factors(1e-4 * (1 + 1e-9), 1.0)
        self.assertAlmostEqual(below.B / above.B, 1.0, delta=1e-8)
        below = form_factors(1.0 - 1e-12, 1.0)
        above = form_factors(1.0 + 1e-12, 1.0)
        self.assertAlmostEqual(below.f / above.f, 1.0, delta=1e-10)

    def test_domain(self):
        with self.assertRaises(DomainError):
            form_factors(1.0, 0.0)
        with self.assertRaises(DomainError):
            form_factors(-1.0, 1.0)


class TotalForce(unittest.TestCase):
    def test_newtonian_limit(self):
        setup = table_setup()
        newton = -CONSTANTS.G * setup.source.mass * setup.probe.mass / setup.x0**2
        self.assertEqual(total_force(setup, 0.0, 1e-3, False, setup.x0), newton)
        self.assertAlmostEqual(abs(newton) / 6.67e-25, 1.0, delta=2e-3)

    def test_point_probe_limit(self):
        setup = table_setup()
        point = total_force(setup, 1e-2, 1e3, False, setup.x0)
        sphere = total_force(setup, 1e-2, 1e3, True, setup.x0)
        self.assertAlmostEqual(point / sphere, 1.0, delta=1e-10)

    def test_attraction_grows(self):
        setup = table_setup()
        newton = abs(total_force(setup, 0.0, 1e-3, True, setup.x0))
        for lam in (1e-4, 1e-3, 1.0):
            self.assertGreater(abs(total_force(setup, 1e-3, lam, True, setup.x0)), newton)
        with self.assertRaises(DomainError):
            total_force(setup, 1e-3, 1e-3, True, 1e-4)


class Linearization(unittest.TestCase):
    def test_long_range_limit(self):
        coefficients = linearized_coefficients(0.5, 1e3, 1e-3, 1.16e-6, False)
        self.assertAlmostEqual(coefficients.kappa / 0.5, 1.0, delta=1e-5)
        self.assertAlmostEqual(coefficients.sigma / 1.0, 1.0, delta=1e-5)

    def test_reference_values(self):
        coefficients = linearized_coefficients(1e-3, 1e-3, 1e-3, 1.16e-6, False)
        self.assertAlmostEqual(coefficients.kappa / 7.3576e-4, 1.0, delta=1e-4)
        self.assertAlmostEqual(coefficients.sigma / 1.8394e-3, 1.0, delta=1e-4)
        self.assertIsNone(coefficients.g_N)
        with_mass = linearized_coefficients(1e-3, 1e-3, 1e-3, 1.16e-6, False, source_mass=1e-6)
        self.assertAlmostEqual(with_mass.g_N / 6.674e-11, 1.0, delta=1e-3)

    def test_small_probe_matches_point_probe(self):
        point = linearized_coefficients(1e-3, 1e-3, 1e-3, 1e-11, False)
        sphere = linearized_coefficients(1e-3, 1e-3, 1e-3, 1e-11, True)
        self.assertAlmostEqual(sphere.kappa / point.kappa, 1.0, delta=1e-12)
        self.assertAlmostEqual(sphere.sigma / point.sigma, 1.0, delta=1e-12)

    def test_properties(self):
        zero = linearized_coefficients(0.0, 1e-3, 1e-3, 1.16e-6, True)
        self.assertEqual((zero.kappa, zero.sigma), (0.0, 0.0))
        previous = 0.0
        for v in np.logspace(-3, 2, 40):
            coefficients = linearized_coefficients(1.0, 1e-3 / v, 1e-3, 1.16e-6, False)
            self.assertGreaterEqual(coefficients.sigma, 2 * coefficients.kappa)
            ratio = coefficients.sigma / coefficients.kappa
            self.assertGreaterEqual(ratio, previous)
            previous = ratio

    def test_finite_difference(self):
        """
        x0 times the derivative of the fifth force at x0 is m g_N sigma.
        """
        setup = table_setup()
        g_N = newtonian_acceleration(setup)
        rng = np.random.default_rng(7)
        lambdas = np.concatenate(
            (10.0 ** rng.uniform(-7.0, -6.5, 10), 10.0 ** rng.uniform(-4.0, -2.0, 10))
        )
        screened = 0
        for i, Lambda in enumerate(lambdas):
            model = ChameleonModel.from_planck_ratio(10.0 ** rng.uniform(-1.0, 1.0), Lambda)
            bg = background_state(model, setup.rho_bg)
            is_screened = screening_radius(setup.source, model, bg).screened
            self.assertEqual(is_screened, i < 10)
            screened += is_screened

            alpha, lam = effective_yukawa(model, setup.source, setup.probe, setup.rho_bg, True)
            self.assertLess(setup.x0 / lam, 30.0)

            def fifth_force(x):
                return total_force(setup, alpha, lam, True, x) - total_force(
                    setup, 0.0, lam, True, x
                )

            h = 1e-4 * setup.x0
            slope = (fifth_force(setup.x0 + h) - fifth_force(setup.x0 - h)) / (2 * h)
            sigma = linearized_coefficients(alpha, lam, setup.x0, setup.probe.radius, True).sigma
            self.assertAlmostEqual(
                slope * setup.x0 / (setup.probe.mass * g_N * sigma), 1.0, delta=1e-4
            )
        self.assertEqual(screened, 10)


class Casimir(unittest.TestCase):
    def test_thermal_estimate(self):
        self.assertEqual(casimir_force(0.0, 2.3e-4, 1.16e-6, 1e-3), 0.0)
        force = casimir_force(300.0, 2.3e-4, 1.16e-6, 1e-3)
        self.assertAlmostEqual(force / 8.8e-27, 1.0, delta=0.05)
        self.assertAlmostEqual(force / 1e-14 / 9e-13, 1.0, delta=0.15)

    def test_setup_acceleration(self):
        setup = table_setup()
        acceleration = casimir_acceleration(300.0, setup)
        self.assertAlmostEqual(acceleration / 9e-13, 1.0, delta=0.15)

    def test_power_law(self):
        R_S, R_P = 2.3e-4, 1.16e-6
        gap = 1e-3 - R_S - R_P
        near = casimir_force(300.0, R_S, R_P, R_S + R_P + gap / 2)
        far = casimir_force(300.0, R_S, R_P, R_S + R_P + gap)
        self.assertAlmostEqual(near / far, 128.0, delta=1e-9)

    def test_monotone(self):
        base = casimir_force(300.0, 2.3e-4, 1.16e-6, 1e-3)
        self.assertLess(casimir_force(300.0, 2.3e-4, 1.16e-6, 2e-3), base)
        self.assertGreater(casimir_force(400.0, 2.3e-4, 1.16e-6, 1e-3), base)
        self.assertGreater(casimir_force(300.0, 2.4e-4, 1.16e-6, 1e-3), base)
        self.assertGreater(casimir_force(300.0, 2.3e-4, 1.2e-6, 1e-3), base)
        with self.assertRaises(DomainError):
            casimir_force(300.0, 2.3e-4, 1.16e-6, 2e-4)


class RetardedTime(unittest.TestCase):
    def test_stationary(self):
        t_r = retarded_time(lambda t: 0.5, 2.0, 1.0)
        self.assertEqual(t_r, 1.0 - 1.5 / CONSTANTS.c)

    def test_oscillating_source(self):
        setup = table_setup()

        def trajectory(t):
            return source_position(setup, t)

        for t in (0.0, 1e-3, 0.37, 1.0):
            t_r = retarded_time(trajectory, 0.0, t)
            self.assertLess(t_r, t)
            self.assertAlmostEqual((t - t_r) / 3.3e-12, 1.0, delta=0.12)
            self.assertAlmostEqual((t - t_r) * CONSTANTS.c / trajectory(t_r), 1.0, delta=1e-3)
            drift = abs(trajectory(t) - trajectory(t_r)) / trajectory(t)
            self.assertLess(drift, 1e-8)

    def test_late_times(self):
        # at t = 1e4 s one float step of t is about 2e-12 s
        def trajectory(t):
            return 1e-3 * math.sin(t)

        t = 1e4
        t_r = retarded_time(trajectory, 1e3, t)
        distance = abs(1e3 - trajectory(t_r))
        self.assertAlmostEqual((t - t_r) * CONSTANTS.c / distance, 1.0, delta=1e-5)
