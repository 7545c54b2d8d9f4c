"""Photon scattering and heating of a thermal cloud in a dark LG trap.

The cloud density is taken in the local-density approximation,
n(r) = g_{3/2}(exp((mu - V(r))/kT)) / lambda_T^3, and the light inside
the dark region is the near-axis power law of the circular beam.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import Boltzmann as KB
from scipy.constants import hbar, pi
from scipy.optimize import brentq
from scipy.special import gammaln

from . import optics
from .bose import bose_g
from .optics import LGBeam
from .species import AtomSpecies
from .thermo import eos_total_number, tc_ideal, thermal_wavelength
from .trap import PowerLawTrap, potential

HOT_CLOUD_FRACTION = 0.2


class ThermalCloudError(ValueError):
    pass


@dataclass(frozen=True)
class ThermalCloud:
    trap: PowerLawTrap
    temperature: float
    mu: float
    n_atoms: float
    mass: float

    def __post_init__(self):
        if not self.mu < 0:
            raise ThermalCloudError("thermal cloud needs mu < 0")
        n = eos_total_number(self.trap, self.temperature, self.mu, self.mass)
        if abs(n - self.n_atoms) > 1e-6 * self.n_atoms:
            raise ThermalCloudError(f"mu gives N = {n:.8g}, expected {self.n_atoms:.8g}")

    @classmethod
    def at(cls, trap: PowerLawTrap, n_atoms, T, mass):
        return cls(trap, T, thermal_mu(trap, n_atoms, T, mass), n_atoms, mass)

    @property
    def fugacity(self):
        return math.exp(self.mu / (KB * self.temperature))


def thermal_mu(trap: PowerLawTrap, n_atoms, T, mass, rtol=1e-10):
    """Chemical potential (J, < 0) of n_atoms thermal atoms at temperature T."""
    if not n_atoms > 0:
        raise ValueError("n_atoms must be positive")
    if T <= tc_ideal(trap, n_atoms, mass):
        raise ThermalCloudError("below condensation; thermal-cloud model invalid")
    kt = KB * T

    def excess(log_x):  # x = -mu / kT
        return math.log(eos_total_number(trap, T, -math.exp(log_x) * kt, mass)) - math.log(n_atoms)

    lo, hi = math.log(1e-16), math.log(700.0)
    if excess(lo) < 0:
        raise ThermalCloudError("below condensation; thermal-cloud model invalid")
    log_x = brentq(excess, lo, hi, xtol=1e-300, rtol=rtol * 1e-2, maxiter=500)
    return -math.exp(log_x) * kt


def _bose_ratio(s_num, s_den, fugacity):
    return bose_g(s_num, fugacity) / bose_g(s_den, fugacity)


def average_intensity_3dlg(cloud: ThermalCloud, beam: LGBeam, sp: AtomSpecies, include_sheet=False):
    """LDA-averaged intensity of the circular beam, W/m^2.

    <I> = 2^(l+1) P / (pi l l! w0^(2l+2)) (kT/U) g_{(5l+3)/2l}(f) / g_{(3l+3)/2l}(f)

    include_sheet adds the light sheet, which contributes the same amount
    by the rho <-> z symmetry of the 3D_LG potential.
    """
    t = cloud.trap
    ell = beam.ell
    if not (t.alpha == t.beta == 2 * ell and t.u_perp == t.u_z):
        raise ValueError("average_intensity_3dlg needs a 3D_LG trap matching the beam's ell")
    u = t.u_perp
    u_beam = optics.powerlaw_coefficient(beam, sp)
    if abs(u_beam - u) > 1e-6 * u:
        raise ValueError(f"beam gives U = {u_beam:.6g}, trap has {u:.6g}")
    _warn_if_hot(cloud, beam, sp)
    kt = KB * cloud.temperature
    logpref = (ell + 1) * math.log(2) + math.log(beam.power) - math.log(pi * ell) - float(gammaln(ell + 1))
    logpref -= (2 * ell + 2) * math.log(beam.waist)
    ratio = _bose_ratio((5 * ell + 3) / (2 * ell), (3 * ell + 3) / (2 * ell), cloud.fugacity)
    out = math.exp(logpref) * (kt / u) * ratio
    return 2 * out if include_sheet else out


def _warn_if_hot(cloud, beam, sp):
    kt = KB * cloud.temperature
    barrier = optics.barrier_height(beam, sp)
    if kt > HOT_CLOUD_FRACTION * barrier:
        warnings.warn(
            f"kT = {kt / barrier:.3g} x barrier height; the power-law intensity is a poor model",
            stacklevel=3,
        )


def average_intensity_quadrature(cloud: ThermalCloud, beam: LGBeam, sp: AtomSpecies, n_nodes=160, span=60.0):
    """<I> of the circular beam by 2-D Gauss-Legendre quadrature over (rho, z).

    Works for any power-law trap; the circular beam's near-axis intensity
    2^(l+1) P rho^(2l) / (pi l! w0^(2l+2)) is used for the light.  The
    domain is cut where V = span * kT.
    """
    t = cloud.trap
    kt = KB * cloud.temperature
    rho_max = (span * kt / t.u_perp) ** (1 / t.alpha)
    z_max = (span * kt / t.u_z) ** (1 / t.beta)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    rho = 0.5 * rho_max * (x + 1)
    wr = 0.5 * rho_max * w
    z = z_max * 0.5 * (x + 1)  # z >= 0 half, doubled below
    wz = 0.5 * z_max * w
    R, Z = np.meshgrid(rho, z, indexing="ij")
    v = potential(t, R, Z)
    lam = float(thermal_wavelength(cloud.temperature, cloud.mass))
    arg = cloud.fugacity * np.exp(-v / kt)
    n = bose_g(1.5, arg) / lam**3
    ell = beam.ell
    k_int = math.exp(
        (ell + 1) * math.log(2) + math.log(beam.power) - math.log(pi) - float(gammaln(ell + 1))
        - (2 * ell + 2) * math.log(beam.waist)
    )
    inten = k_int * R ** (2 * ell)
    jac = 2 * pi * R * 2  # azimuth and the z < 0 half
    weights = np.outer(wr, wz) * jac
    number = np.sum(n * weights)
    return float(np.sum(n * inten * weights) / number)


def scattering_rate(avg_intensity, sp: AtomSpecies, detuning):
    """Two-level photon scattering rate in 1/s."""
    if not detuning > 0:
        raise ValueError("detuning must be positive")
    g = sp.gamma_s
    i = np.asarray(avg_intensity, dtype=float)
    out = i * g**3 / (2 * (sp.i_sat * g**2 + i * g**2 + 4 * sp.i_sat * detuning**2))
    return out if out.ndim else float(out)


def recoil_temperature(sp: AtomSpecies):
    """T_rec = hbar^2 k^2 / (m k_B) at the transition wavelength."""
    return (hbar * sp.wavenumber) ** 2 / (sp.mass * KB)


def heating_rate(eta_sc, sp: AtomSpecies):
    """dT/dt in K/s: one recoil energy per event shared over three degrees of freedom."""
    if np.any(np.asarray(eta_sc) < 0):
        raise ValueError("eta_sc must be non-negative")
    return 2.0 / 3.0 * recoil_temperature(sp) * eta_sc
