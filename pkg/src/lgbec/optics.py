"""Laguerre-Gaussian LG_0^l beams and their blue-detuned dipole potential."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, pi
from scipy.special import gammaln

from .species import AtomSpecies

MAX_ELL = 64


@dataclass(frozen=True)
class LGBeam:
    """A p = 0 Laguerre-Gaussian mode.

    ell is the azimuthal index, power in W, waist in m, detuning in rad/s
    (positive = blue), wavelength in m.
    """

    ell: int
    power: float
    waist: float
    detuning: float
    wavelength: float = 760.4e-9

    def __post_init__(self):
        if int(self.ell) != self.ell or not 1 <= self.ell <= MAX_ELL:
            raise ValueError(f"ell must be an integer in [1, {MAX_ELL}], got {self.ell!r}")
        for f in ("power", "waist", "detuning", "wavelength"):
            if not getattr(self, f) > 0:
                raise ValueError(f"{f} must be positive, got {getattr(self, f)!r}")


def _log_factorial(n):
    return float(gammaln(n + 1))


def intensity(beam: LGBeam, rho):
    """Intensity profile I(rho) in W/m^2."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be non-negative")
    l = beam.ell
    u = 2 * rho**2 / beam.waist**2
    with np.errstate(divide="ignore"):
        log_shape = np.where(u > 0, l * np.log(u) - u, -np.inf)
    pref = 2 * beam.power / (pi * beam.waist**2)
    out = pref * np.exp(log_shape - _log_factorial(l))
    return out if out.ndim else float(out)


def peak_intensity(beam: LGBeam) -> float:
    """Intensity on the bright ring."""
    l = beam.ell
    return 2 * beam.power / (pi * beam.waist**2) * math.exp(
        l * math.log(l) - _log_factorial(l) - l
    )


def ring_radius(beam: LGBeam) -> float:
    return beam.waist * math.sqrt(beam.ell / 2)


def rayleigh_range(beam: LGBeam) -> float:
    return pi * beam.waist**2 / beam.wavelength


def light_shift_factor(beam: LGBeam, sp: AtomSpecies) -> float:
    """hbar Gamma^2 / (8 delta I_s): converts intensity to potential energy."""
    return hbar * sp.gamma_s**2 / (8 * beam.detuning * sp.i_sat)


def dipole_potential(beam: LGBeam, sp: AtomSpecies, rho):
    """Repulsive dipole potential V(rho) in J."""
    return light_shift_factor(beam, sp) * intensity(beam, rho)


def barrier_height(beam: LGBeam, sp: AtomSpecies) -> float:
    return light_shift_factor(beam, sp) * peak_intensity(beam)


def powerlaw_prefactor(ell, detuning, sp: AtomSpecies) -> float:
    """K such that U = K * P / w0**(2 ell + 2) for the near-axis power law."""
    return math.exp(ell * math.log(2) - math.log(4 * pi) - _log_factorial(ell)) * (
        hbar * sp.gamma_s**2 / (detuning * sp.i_sat)
    )


def powerlaw_coefficient(beam: LGBeam, sp: AtomSpecies) -> float:
    """U with V(rho) ~ U rho^(2 ell) near the axis, in J/m^(2 ell)."""
    return (
        powerlaw_prefactor(beam.ell, beam.detuning, sp)
        * beam.power
        / beam.waist ** (2 * beam.ell + 2)
    )


def waist_for_coefficient(u, ell, power, detuning, sp: AtomSpecies) -> float:
    """Waist giving the power-law coefficient u (inverse of powerlaw_coefficient)."""
    if not u > 0:
        raise ValueError("u must be positive")
    k = powerlaw_prefactor(ell, detuning, sp)
    return math.exp((math.log(k * power) - math.log(u)) / (2 * ell + 2))
