"""
    Physical constants and the SI <-> natural unit bridge.

    Chameleon formulas are evaluated with hbar = c = 1 and energies in eV:
    masses become eV, lengths eV^-1 and mass densities eV^4.
"""

import math
from dataclasses import dataclass

from modgrav.exceptions import DomainError


@dataclass(frozen=True)
class Constants:
    # SI 2019 exact values for h, c, k_B and e
    hbar: float = 6.62607015e-34 / (2.0 * math.pi)
    c: float = 299792458.0
    G: float = 6.67430e-11
    k_B: float = 1.380649e-23
    eV: float = 1.602176634e-19
    hbar_c: float = 1.973269804e-7
    reduced_planck_mass_kg: float = 4.341e-9

    @property
    def reduced_planck_mass_eV(self) -> float:
        return self.reduced_planck_mass_kg * self.c**2 / self.eV

    def serialize(self) -> dict:
        return {
            "hbar": self.hbar,
            "c": self.c,
            "G": self.G,
            "k_B": self.k_B,
            "eV": self.eV,
            "hbar_c": self.hbar_c,
            "reduced_planck_mass_kg": self.reduced_planck_mass_kg,
            "reduced_planck_mass_eV": self.reduced_planck_mass_eV,
        }


CONSTANTS = Constants()


def _require_non_negative(name: str, value: float):
    if not value >= 0.0:
        raise DomainError(f"{name} must be non-negative, got {value}")


def mass_to_natural(mass_kg: float) -> float:
    _require_non_negative("mass", mass_kg)
    return mass_kg * CONSTANTS.c**2 / CONSTANTS.eV


def mass_from_natural(mass_eV: float) -> float:
    _require_non_negative("mass", mass_eV)
    return mass_eV * CONSTANTS.eV / CONSTANTS.c**2


def density_to_natural(rho: float) -> float:
    _require_non_negative("density", rho)
    return rho * CONSTANTS.c**2 / CONSTANTS.eV * CONSTANTS.hbar_c**3


def density_from_natural(rho_eV4: float) -> float:
    _require_non_negative("density", rho_eV4)
    return rho_eV4 / CONSTANTS.hbar_c**3 * CONSTANTS.eV / CONSTANTS.c**2


def length_to_natural(length_m: float) -> float:
    """
    Length in eV^-1.
    """
    _require_non_negative("length", length_m)
    return length_m / CONSTANTS.hbar_c


def length_from_natural(length_inv_eV: float) -> float:
    _require_non_negative("length", length_inv_eV)
    return length_inv_eV * CONSTANTS.hbar_c


def density_from_pressure(P: float, molecule_mass: float, T: float) -> float:
    """
    Ideal-gas mass density of the residual gas in the vacuum chamber.
    """
    if not T > 0.0:
        raise DomainError(f"temperature must be positive, got {T}")
    if not molecule_mass > 0.0:
        raise DomainError(f"molecule mass must be positive, got {molecule_mass}")
    _require_non_negative("pressure", P)
    return P * molecule_mass / (CONSTANTS.k_B * T)


def radius_from_mass(mass: float, density: float) -> float:
    if not density > 0.0:
        raise DomainError(f"density must be positive, got {density}")
    _require_non_negative("mass", mass)
    return (3.0 * mass / (4.0 * math.pi * density)) ** (1.0 / 3.0)


def thermal_parameter(T: float, omega_mech: float) -> float:
    """
    r_T defined by tanh(r_T) = exp(-hbar omega / (2 k_B T)).
    """
    if not T > 0.0:
        raise DomainError(f"temperature must be positive, got {T}")
    if not omega_mech > 0.0:
        raise DomainError(f"mechanical frequency must be positive, got {omega_mech}")
    y = CONSTANTS.hbar * omega_mech / (2.0 * CONSTANTS.k_B * T)
    # atanh(e^-y) = 0.5 log((1 + e^-y) / (1 - e^-y)), with 1 - e^-y from expm1
    q = -math.expm1(-y)
    return 0.5 * math.log((2.0 - q) / q)
