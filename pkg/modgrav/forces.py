"""
    Forces between the oscillating source sphere and the probe:
    Newtonian attraction with a Yukawa correction, the finite-probe form
    factor, the linearized drive coefficients kappa and sigma, the
    thermal Casimir systematic and the retarded-time helper.

    Forces act along the source-probe axis; attraction is negative.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from modgrav.chameleon import SphereBody
from modgrav.exceptions import DomainError, NumericalError
from modgrav.units import CONSTANTS

# below this R_P/lambda the hyperbolic terms come from their leading series
FORM_FACTOR_SERIES_THRESHOLD = 1e-4
RETARDED_TIME_TOLERANCE = 1e-15
RETARDED_TIME_MAX_ITERATIONS = 100


@dataclass(frozen=True)
class ExperimentSetup:
    x0: float
    epsilon: float
    omega0: float
    phi0: float
    source: SphereBody
    probe: SphereBody
    rho_bg: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not self.rho_bg > 0.0:
            raise DomainError(f"background density must be positive, got {self.rho_bg}")
        closest = self.x0 * (1.0 - self.epsilon)
        contact = self.source.radius + self.probe.radius
        if not closest > contact:
            raise DomainError(
                f"bodies touch: closest approach {closest} m is within the radii sum {contact} m"
            )

    def serialize(self) -> dict:
        return {
            "x0": self.x0,
            "epsilon": self.epsilon,
            "omega0": self.omega0,
            "phi0": self.phi0,
            "source": self.source.serialize(),
            "probe": self.probe.serialize(),
            "rho_bg": self.rho_bg,
        }


@dataclass(frozen=True)
class LinearizedCoefficients:
    kappa: float
    sigma: float
    g_N: Optional[float] = None

    def serialize(self) -> dict:
        return {"kappa": self.kappa, "sigma": self.sigma, "g_N": self.g_N}


class FormFactors(NamedTuple):
    A: float
    B: float
    f: float


def _hyperbolic_terms(u: float):
    """
    Returns (1+u)e^-u sinh(u)/u and (1+u)e^-u (cosh(u) - sinh(u)/u).
    """
    if u < FORM_FACTOR_SERIES_THRESHOLD:
        u2 = u * u
        sinhc = 1.0 + u2 / 6.0 + u2 * u2 / 120.0
        cosh_minus_sinhc = u2 / 3.0 + u2 * u2 / 30.0
        damping = (1.0 + u) * math.exp(-u)
        return damping * sinhc, damping * cosh_minus_sinhc
    if u < 1.0:
        # sum_k u^2k * 2k / (2k+1)! converges fast and avoids the cancellation
        damping = (1.0 + u) * math.exp(-u)
        u2 = u * u
        term, total = 1.0, 0.0
        sinhc = 1.0
        for k in range(1, 16):
            term *= u2 / ((2 * k) * (2 * k + 1))
            sinhc += term
            total += 2 * k * term
        return damping * sinhc, damping * total
    # e^-u sinh(u) and e^-u cosh(u) without overflow
    decay = math.exp(-2.0 * u)
    A = (1.0 + u) * (-math.expm1(-2.0 * u)) / (2.0 * u)
    return A, (1.0 + u) * (1.0 + decay) / 2.0 - A


def form_factors(u: float, v: float) -> FormFactors:
    """
    Finite-size factors of a homogeneous probe sphere of radius R_P at
    distance x, with u = R_P/lambda and v = x/lambda.
    """
    if not u >= 0.0:
        raise DomainError(f"u = R_P/lambda must be non-negative, got {u}")
    if not v > 0.0:
        raise DomainError(f"v = x/lambda must be positive, got {v}")
    A, B = _hyperbolic_terms(u)
    f = A - (v / (1.0 + v) - 2.0) * B / v
    return FormFactors(A=A, B=B, f=f)


def newtonian_acceleration(setup: ExperimentSetup) -> float:
    """
    g_N = G M_S / x0^2, the Newtonian pull on the probe at equilibrium.
    """
    return CONSTANTS.G * setup.source.mass / setup.x0**2


def source_position(setup: ExperimentSetup, t: float) -> float:
    return setup.x0 * (1.0 - setup.epsilon * math.cos(setup.omega0 * t + setup.phi0))


def total_force(
    setup: ExperimentSetup,
    alpha: float,
    lam: float,
    include_probe_screening: bool,
    x_S: float,
) -> float:
    contact = setup.source.radius + setup.probe.radius
    if not x_S > contact:
        raise DomainError(f"separation {x_S} m does not exceed the radii sum {contact} m")
    if not lam > 0.0:
        raise DomainError(f"lambda must be positive, got {lam}")

    newton = -CONSTANTS.G * setup.source.mass * setup.probe.mass / x_S**2
    if math.isinf(lam):
        return newton * (1.0 + alpha)

    v = x_S / lam
    modification = alpha * (1.0 + v) * math.exp(-v)
    if include_probe_screening:
        modification *= form_factors(setup.probe.radius / lam, v).f
    return newton * (1.0 + modification)


def linearized_coefficients(
    alpha: float,
    lam: float,
    x0: float,
    R_P: float,
    probe_screened: bool,
    source_mass: Optional[float] = None,
) -> LinearizedCoefficients:
    """
    Static (kappa) and oscillating (sigma) fifth-force fractions from
    expanding the force to first order in the source displacement.
    g_N is filled in when the source mass is known.
    """
    if not x0 > 0.0:
        raise DomainError(f"x0 must be positive, got {x0}")
    if not lam > 0.0:
        raise DomainError(f"lambda must be positive, got {lam}")

    g_N = CONSTANTS.G * source_mass / x0**2 if source_mass is not None else None
    v = x0 / lam
    decay = alpha * math.exp(-v)
    if not probe_screened:
        kappa = decay * (1.0 + v)
        sigma = decay * (2.0 + 2.0 * v + v * v)
    else:
        A, B, _ = form_factors(R_P / lam, v)
        kappa = decay * ((1.0 + v) * A + (1.0 + 2.0 / v) * B)
        sigma = decay * ((2.0 + 2.0 * v + v * v) * A + (4.0 + 6.0 / v + v) * B)
    return LinearizedCoefficients(kappa=kappa, sigma=sigma, g_N=g_N)


def casimir_force(T: float, R_S: float, R_P: float, x0: float) -> float:
    """
    Classical thermal Casimir attraction between two Drude-metal spheres,
    magnitude in N.
    """
    if not T >= 0.0:
        raise DomainError(f"temperature must be non-negative, got {T}")
    gap = x0 - R_S - R_P
    if not gap > 0.0:
        raise DomainError(f"spheres overlap: surface gap is {gap} m")
    return 18.0 * CONSTANTS.k_B * T * R_S**3 * R_P**3 / gap**7


def casimir_acceleration(T: float, setup: ExperimentSetup) -> float:
    force = casimir_force(T, setup.source.radius, setup.probe.radius, setup.x0)
    return force / setup.probe.mass


def retarded_time(
    trajectory: Callable[[float], float],
    X: float,
    t: float,
    tolerance: float = RETARDED_TIME_TOLERANCE,
    max_iterations: int = RETARDED_TIME_MAX_ITERATIONS,
) -> float:
    """
    Solves t_r = t - |X - q(t_r)| / c by fixed-point iteration, which
    contracts for sub-luminal trajectories.
    """
    # a few ulps of t is the best any iteration can resolve
    tolerance = max(tolerance, 4.0 * float(np.spacing(abs(t))))
    t_r = t - abs(X - trajectory(t)) / CONSTANTS.c
    for _ in range(max_iterations):
        updated = t - abs(X - trajectory(t_r)) / CONSTANTS.c
        if abs(updated - t_r) <= tolerance:
            return updated
        t_r = updated
    raise NumericalError(
        "retarded time did not converge",
        {"t": t, "X": X, "last": t_r, "iterations": max_iterations},
    )
