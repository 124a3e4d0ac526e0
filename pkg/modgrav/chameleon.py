"""
    The n=1 chameleon: background state, screening of spheres and the
    asymptotically matched static field profile.

    Internally every quantity is in natural units (eV, eV^-1, eV^4);
    SI values enter and leave through modgrav.units.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from scipy import optimize

from modgrav.exceptions import DomainError, NumericalError
from modgrav.units import (
    CONSTANTS,
    density_to_natural,
    length_to_natural,
    mass_to_natural,
    radius_from_mass,
)

# relative band below K = 1 + a that still counts as unscreened
SCREENING_CONDITION_TOLERANCE = 1e-12
# below this 1 - S/R the screening factor comes from the first-order expansion
TAYLOR_THRESHOLD = 1e-6
CUBIC_TOLERANCE = 1e-14
CUBIC_MAX_ITERATIONS = 200
# absolute tolerance on ln Lambda of the screening onset
ONSET_TOLERANCE = 1e-14


@dataclass(frozen=True)
class ChameleonModel:
    M: float
    Lambda: float
    n: int = 1

    def __post_init__(self):
        if not self.M > 0.0:
            raise DomainError(f"coupling mass M must be positive, got {self.M}")
        if not self.Lambda > 0.0:
            raise DomainError(f"energy scale Lambda must be positive, got {self.Lambda}")
        if self.n != 1:
            raise DomainError(f"only the n=1 potential is supported, got n={self.n}")

    @staticmethod
    def from_planck_ratio(M_ratio: float, Lambda: float) -> "ChameleonModel":
        return ChameleonModel(M=M_ratio * CONSTANTS.reduced_planck_mass_eV, Lambda=Lambda)

    @property
    def planck_ratio(self) -> float:
        return self.M / CONSTANTS.reduced_planck_mass_eV

    def serialize(self) -> dict:
        return {"M": self.M, "M_ratio": self.planck_ratio, "Lambda": self.Lambda, "n": self.n}


@dataclass(frozen=True)
class SphereBody:
    mass: float
    radius: float
    density: float

    def __post_init__(self):
        if not (self.mass > 0.0 and self.radius > 0.0 and self.density > 0.0):
            raise DomainError(
                f"sphere needs positive mass, radius and density, got "
                f"{self.mass}, {self.radius}, {self.density}"
            )
        expected = self.mass / (4.0 * math.pi * self.radius**3 / 3.0)
        if abs(expected - self.density) > 1e-9 * self.density:
            raise DomainError(
                f"inconsistent sphere: density {self.density} but mass/volume is {expected}"
            )

    @staticmethod
    def from_any(
        mass: Optional[float] = None,
        radius: Optional[float] = None,
        density: Optional[float] = None,
    ) -> "SphereBody":
        """
        Build a sphere from any two of mass, radius and density.
        """
        given = sum(value is not None for value in (mass, radius, density))
        if given != 2:
            raise DomainError(f"exactly two of mass/radius/density are required, got {given}")
        if radius is None:
            assert mass is not None and density is not None
            radius = radius_from_mass(mass, density)
        elif mass is None:
            assert density is not None
            mass = density * 4.0 * math.pi * radius**3 / 3.0
        else:
            if not radius > 0.0:
                raise DomainError(f"radius must be positive, got {radius}")
            density = mass / (4.0 * math.pi * radius**3 / 3.0)
        return SphereBody(mass=mass, radius=radius, density=density)

    def serialize(self) -> dict:
        return {"mass": self.mass, "radius": self.radius, "density": self.density}

    @staticmethod
    def deserialize(config: dict) -> "SphereBody":
        values = (config.get("mass"), config.get("radius"), config.get("density"))
        if all(value is not None for value in values):
            # serialized bodies carry all three, the constructor checks consistency
            return SphereBody(*(float(value) for value in values))
        return SphereBody.from_any(*values)


@dataclass(frozen=True)
class BackgroundState:
    phi_bg: float
    m_bg: float
    lambda_bg: float
    rho_bg: float

    def serialize(self) -> dict:
        return {
            "phi_bg": self.phi_bg,
            "m_bg": self.m_bg,
            "lambda_bg": self.lambda_bg,
            "rho_bg": self.rho_bg,
        }


@dataclass(frozen=True)
class ScreeningResult:
    S: float
    xi: float
    screened: bool

    def serialize(self) -> dict:
        return {"S": self.S, "xi": self.xi, "screened": self.screened}


class YukawaParameters(NamedTuple):
    alpha: float
    lam: float


def equilibrium_field(model: ChameleonModel, rho: float) -> float:
    """
    Minimum of the effective potential at mass density rho (kg/m^3), in eV.
    """
    if not rho > 0.0:
        raise DomainError(f"density must be positive, got {rho}")
    return math.sqrt(model.M * model.Lambda**5 / density_to_natural(rho))


def background_state(model: ChameleonModel, rho_bg: float) -> BackgroundState:
    if not rho_bg > 0.0:
        raise DomainError(f"background density must be positive, got {rho_bg}")
    rho = density_to_natural(rho_bg)
    phi_bg = math.sqrt(model.M * model.Lambda**5 / rho)
    m_bg = (4.0 * rho**3 / (model.M**3 * model.Lambda**5)) ** 0.25
    return BackgroundState(
        phi_bg=phi_bg, m_bg=m_bg, lambda_bg=CONSTANTS.hbar_c / m_bg, rho_bg=rho_bg
    )


def cubic_offset(m_bg_R: float) -> float:
    return -2.0 / 3.0 * m_bg_R / (1.0 + m_bg_R)


def solve_screening_cubic(K: float, m_bg_R: float) -> float:
    """
    Root s = S/R in [0, 1] of s^2 + a s^3 = 1 - K + a,
    a = 2/3 (1/(1 + m_bg R) - 1), with K = 8 pi M R (phi_bg - phi_i) / (3 M_i).

    Newton steps are taken while they stay inside the bracket,
    bisection otherwise. The left side is monotone on [0, 1].
    """
    if not m_bg_R >= 0.0:
        raise DomainError(f"m_bg R must be non-negative, got {m_bg_R}")
    a = cubic_offset(m_bg_R)
    rhs = 1.0 - K + a

    def residual(s: float):
        return s * s + a * s**3 - rhs, 2.0 * s + 3.0 * a * s * s

    f_low, f_high = -rhs, K
    if f_low > 0.0 or f_high < 0.0:
        raise NumericalError(
            "screening cubic has no root in [0, R]",
            {"K": K, "m_bg_R": m_bg_R, "f(0)": f_low, "f(1)": f_high},
        )
    if f_low == 0.0:
        return 0.0
    if f_high == 0.0:
        return 1.0

    low, high = 0.0, 1.0
    s = 0.5
    step_old = high - low
    step = step_old
    f, df = residual(s)
    for _ in range(CUBIC_MAX_ITERATIONS):
        newton_outside = ((s - high) * df - f) * ((s - low) * df - f) > 0.0
        slow = abs(2.0 * f) > abs(step_old * df)
        if newton_outside or slow:
            step_old = step
            step = 0.5 * (high - low)
            s = low + step
        else:
            step_old = step
            step = f / df
            s -= step
        if abs(step) < CUBIC_TOLERANCE * max(s, CUBIC_TOLERANCE):
            return min(max(s, 0.0), 1.0)
        f, df = residual(s)
        if f == 0.0:
            return s
        if f < 0.0:
            low = s
        else:
            high = s
    raise NumericalError(
        "screening cubic did not converge",
        {"K": K, "m_bg_R": m_bg_R, "bracket": (low, high)},
    )


class _BodyTerms(NamedTuple):
    # natural-unit quantities shared by the screening radius and the profile
    R: float
    M_i: float
    phi_i: float
    m_R: float


def _body_terms(body: SphereBody, model: ChameleonModel, bg: BackgroundState) -> _BodyTerms:
    R = length_to_natural(body.radius)
    return _BodyTerms(
        R=R,
        M_i=mass_to_natural(body.mass),
        phi_i=equilibrium_field(model, body.density),
        m_R=bg.m_bg * R,
    )


def _coupling(model: ChameleonModel, bg: BackgroundState, terms: _BodyTerms) -> float:
    return model.M * terms.R * (bg.phi_bg - terms.phi_i) / terms.M_i


def is_screened(body: SphereBody, model: ChameleonModel, bg: BackgroundState) -> bool:
    """
    True while the screening cubic has a root S > 0, i.e. K < 1 + a.
    S shrinks to zero at the equality, so xi reaches 1 continuously.
    """
    terms = _body_terms(body, model, bg)
    # weakly perturbing bodies (not denser than the background) stay unscreened
    if terms.phi_i >= bg.phi_bg:
        return False
    K = 8.0 * math.pi / 3.0 * _coupling(model, bg, terms)
    return K < (1.0 + cubic_offset(terms.m_R)) * (1.0 - SCREENING_CONDITION_TOLERANCE)


def screening_radius(
    body: SphereBody, model: ChameleonModel, bg: BackgroundState
) -> ScreeningResult:
    if not is_screened(body, model, bg):
        return ScreeningResult(S=0.0, xi=1.0, screened=False)

    terms = _body_terms(body, model, bg)
    coupling = _coupling(model, bg, terms)
    K = 8.0 * math.pi / 3.0 * coupling
    s = solve_screening_cubic(K, terms.m_R)
    if 1.0 - s < TAYLOR_THRESHOLD:
        xi = 4.0 * math.pi * coupling * (1.0 + terms.m_R)
    else:
        xi = 1.0 - s**3
    return ScreeningResult(S=s * body.radius, xi=min(max(xi, 0.0), 1.0), screened=True)


def closed_form_screening_radius(
    body: SphereBody, model: ChameleonModel, bg: BackgroundState
) -> float:
    """
    Thin-shell radius in the m_bg R -> 0, phi_bg >> phi_i limit.
    """
    terms = _body_terms(body, model, bg)
    radicand = 1.0 - 8.0 * math.pi * model.M * terms.R * bg.phi_bg / (3.0 * terms.M_i)
    if radicand < 0.0:
        raise DomainError(f"body is not screened in the light-field limit ({radicand})")
    return body.radius * math.sqrt(radicand)


def field_profile(
    body: SphereBody, model: ChameleonModel, bg: BackgroundState, r: float
) -> float:
    """
    Static field (eV) at distance r (m) from the centre of the body.
    """
    if not r >= 0.0:
        raise DomainError(f"radial distance must be non-negative, got {r}")
    screening = screening_radius(body, model, bg)
    terms = _body_terms(body, model, bg)
    R, M_i = terms.R, terms.M_i
    x = length_to_natural(r)

    def exterior(x: float) -> float:
        amplitude = M_i * screening.xi / (4.0 * math.pi * model.M * (1.0 + terms.m_R))
        return bg.phi_bg - amplitude / x * math.exp(-bg.m_bg * (x - R))

    if x > R:
        return exterior(x)

    slope = M_i / (8.0 * math.pi * R * model.M)
    if screening.screened:
        S = length_to_natural(screening.S)
        if x < S:
            return terms.phi_i
        return terms.phi_i + slope * (x**3 - 3.0 * S * S * x + 2.0 * S**3) / (x * R * R)

    # no thin shell: the interior offset is fixed by continuity at the surface
    D = exterior(R) - slope
    return D + slope * x * x / (R * R)


def effective_yukawa(
    model: ChameleonModel,
    source: SphereBody,
    probe: SphereBody,
    rho_bg: float,
    include_probe: bool,
) -> YukawaParameters:
    bg = background_state(model, rho_bg)
    xi = screening_radius(source, model, bg).xi
    if include_probe:
        xi *= screening_radius(probe, model, bg).xi
    alpha = 2.0 * (CONSTANTS.reduced_planck_mass_eV / model.M) ** 2 * xi
    return YukawaParameters(alpha=alpha, lam=bg.lambda_bg)


def screening_onset_lambda(body: SphereBody, rho_bg: float, M: float) -> float:
    """
    Lambda (eV) at which the screening radius of the body shrinks to zero,
    the root of K(Lambda) = 1 + a(Lambda). Smaller Lambda screens the body,
    larger Lambda leaves it unscreened.

    K grows as Lambda^(5/2) while a stays in (-2/3, 0], so the root lies
    between the Lambda values where K = 1/3 and K = 1 and is unique there.
    """
    if not (M > 0.0 and rho_bg > 0.0):
        raise DomainError("coupling mass and background density must be positive")
    if not body.density > rho_bg:
        raise DomainError(
            f"a body of density {body.density} is never screened in a background of {rho_bg}"
        )
    R = length_to_natural(body.radius)
    rho = density_to_natural(rho_bg)
    # K = K_unit Lambda^(5/2) and m_bg R = m_unit Lambda^(-5/4)
    contrast = rho**-0.5 - density_to_natural(body.density) ** -0.5
    K_unit = 8.0 * math.pi / 3.0 * M**1.5 * R * contrast / mass_to_natural(body.mass)
    m_unit = (4.0 * rho**3 / M**3) ** 0.25 * R

    def excess(log_Lambda: float) -> float:
        K = K_unit * math.exp(2.5 * log_Lambda)
        return K - 1.0 - cubic_offset(m_unit * math.exp(-1.25 * log_Lambda))

    log_low = -0.4 * math.log(3.0 * K_unit)
    log_high = -0.4 * math.log(K_unit)
    return math.exp(optimize.brentq(excess, log_low, log_high, xtol=ONSET_TOLERANCE))
