"""Composite power-law trap U_perp rho^alpha + U_z z^beta.

Geometry (volumes, shape parameter), Thomas-Fermi quantities, the three
named LG configurations and the inverse problem for the beam waists.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import optics
from .species import AtomSpecies, interaction_strength

TWO_PI = 2 * math.pi

# Harmonic direction(s) are this many times narrower than the power-law
# direction at eps = mu_TF in the 1D_LG and 2D_LG configurations.
DEFAULT_ASPECT = 5.0


def _check_exponent(name, v):
    if int(v) != v or v < 2 or int(v) % 2:
        raise ValueError(f"{name} must be an even integer >= 2, got {v!r}")


@dataclass(frozen=True)
class PowerLawTrap:
    alpha: int
    beta: int
    u_perp: float
    u_z: float

    def __post_init__(self):
        _check_exponent("alpha", self.alpha)
        _check_exponent("beta", self.beta)
        if not (self.u_perp > 0 and self.u_z > 0):
            raise ValueError("u_perp and u_z must be positive")

    @property
    def eta(self):
        return shape_eta(self.alpha, self.beta)


class Kind(enum.Enum):
    OneD_LG = "1D_LG"
    TwoD_LG = "2D_LG"
    ThreeD_LG = "3D_LG"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        t = str(text).strip().upper().replace("_LG", "").replace("LG", "")
        for k in cls:
            if k.value.startswith(t):
                return k
        raise ValueError(f"unknown configuration {text!r}")

    def exponents(self, ell):
        if self is Kind.OneD_LG:
            return 2, 2 * ell
        if self is Kind.TwoD_LG:
            return 2 * ell, 2
        return 2 * ell, 2 * ell


@dataclass(frozen=True)
class TrapConfiguration:
    kind: Kind
    ell: int
    trap: PowerLawTrap
    beams: tuple = field(default=())
    aspect: float = DEFAULT_ASPECT

    def __post_init__(self):
        a, b = self.kind.exponents(self.ell)
        if (self.trap.alpha, self.trap.beta) != (a, b):
            raise ValueError(f"{self.kind.value} with ell={self.ell} needs (alpha, beta) = ({a}, {b})")
        if self.kind is Kind.ThreeD_LG and self.trap.u_perp != self.trap.u_z:
            raise ValueError("3D_LG requires u_perp == u_z")


def potential(trap: PowerLawTrap, rho, z):
    rho = np.asarray(rho, dtype=float)
    z = np.asarray(z, dtype=float)
    return trap.u_perp * rho**trap.alpha + trap.u_z * z**trap.beta


def shape_eta(alpha, beta):
    _check_exponent("alpha", alpha)
    _check_exponent("beta", beta)
    return 2 / alpha + 1 / beta + 0.5


def _log_gamma_product(alpha, beta):
    return float(gammaln(2 / alpha + 1) + gammaln(1 / beta + 1))


def log_c_alpha_beta(trap: PowerLawTrap) -> float:
    return (
        -2 / trap.alpha * math.log(trap.u_perp)
        - 1 / trap.beta * math.log(trap.u_z)
        + _log_gamma_product(trap.alpha, trap.beta)
    )


def c_alpha_beta(trap: PowerLawTrap) -> float:
    """Geometric constant C_ab (SI: m^3 J^(1/2 - eta))."""
    return math.exp(log_c_alpha_beta(trap))


def trap_volume(trap: PowerLawTrap, epsilon):
    """Volume of the region V(rho, z) <= epsilon."""
    epsilon = np.asarray(epsilon, dtype=float)
    if np.any(epsilon <= 0):
        raise ValueError("epsilon must be positive")
    eta = trap.eta
    logpref = math.log(TWO_PI) + log_c_alpha_beta(trap) - float(gammaln(eta + 0.5))
    out = np.exp(logpref + (eta - 0.5) * np.log(epsilon))
    return out if out.ndim else float(out)


def half_widths(trap: PowerLawTrap, epsilon):
    """Classical turning points (rho, |z|) at energy epsilon."""
    return (
        (epsilon / trap.u_perp) ** (1 / trap.alpha),
        (epsilon / trap.u_z) ** (1 / trap.beta),
    )


def _check_g(g):
    if not g > 0:
        raise ValueError("Thomas-Fermi quantities need g > 0")


def mu_thomas_fermi(trap: PowerLawTrap, n_c, g):
    """Thomas-Fermi chemical potential for n_c condensed atoms (0 at n_c = 0)."""
    _check_g(g)
    n_c = np.asarray(n_c, dtype=float)
    if np.any(n_c < 0):
        raise ValueError("n_c must be non-negative")
    eta = trap.eta
    expo = 2 / (2 * eta + 1)
    logk = math.log(g) + float(gammaln(eta + 1.5)) - math.log(TWO_PI) - log_c_alpha_beta(trap)
    with np.errstate(divide="ignore"):
        out = np.where(n_c > 0, np.exp(expo * (logk + np.log(np.where(n_c > 0, n_c, 1.0)))), 0.0)
    return out if out.ndim else float(out)


def condensate_volume(trap: PowerLawTrap, n_c, g):
    return trap_volume(trap, mu_thomas_fermi(trap, n_c, g))


def condensate_volume_closed(trap: PowerLawTrap, n_c, g) -> float:
    """Same quantity written directly in terms of C_ab and n_c."""
    _check_g(g)
    eta = trap.eta
    logc = log_c_alpha_beta(trap)
    return math.exp(
        math.log(TWO_PI) + logc - float(gammaln(eta + 0.5))
        + (2 * eta - 1) / (2 * eta + 1)
        * (math.log(g) + float(gammaln(eta + 1.5)) - math.log(TWO_PI) - logc + math.log(n_c))
    )


def c_for_condensate_volume(eta, n_c, g, target_vc) -> float:
    """C_ab that makes the Thomas-Fermi condensate occupy target_vc."""
    p = (2 * eta - 1) / (2 * eta + 1)
    logv = math.log(target_vc) + float(gammaln(eta + 0.5)) - math.log(TWO_PI)
    logs = math.log(g) + float(gammaln(eta + 1.5)) - math.log(TWO_PI) + math.log(n_c)
    return math.exp((logv - p * logs) / (1 - p))


def build_configuration(kind, ell, sp: AtomSpecies, n_atoms, target_vc, aspect=DEFAULT_ASPECT):
    """Solve (U_perp, U_z) for one of the named configurations.

    The condensate volume of n_atoms is pinned to target_vc; for 1D_LG and
    2D_LG the harmonic direction's turning point at mu_TF is ``aspect``
    times smaller than the power-law direction's.  Everything is closed
    form, so identical inputs give bitwise identical traps.
    """
    kind = Kind.parse(kind)
    if int(ell) != ell or ell < 1:
        raise ValueError("ell must be a positive integer")
    if not (target_vc > 0 and n_atoms >= 1 and aspect > 0):
        raise ValueError("need target_vc > 0, n_atoms >= 1, aspect > 0")
    g = interaction_strength(sp)
    _check_g(g)
    alpha, beta = kind.exponents(int(ell))
    eta = shape_eta(alpha, beta)
    c = c_for_condensate_volume(eta, n_atoms, g, target_vc)
    logmu = 2 / (2 * eta + 1) * (
        math.log(g) + float(gammaln(eta + 1.5)) - math.log(TWO_PI) - math.log(c) + math.log(n_atoms)
    )
    logg = _log_gamma_product(alpha, beta)
    if kind is Kind.ThreeD_LG:
        u = math.exp((logg - math.log(c)) / (eta - 0.5))
        trap = PowerLawTrap(alpha, beta, u, u)
    else:
        # C = G mu^-(eta - 1/2) rho_tf^2 z_tf
        log_r2z = math.log(c) + (eta - 0.5) * logmu - logg
        if kind is Kind.OneD_LG:  # z_tf = aspect * rho_tf
            log_rho = (log_r2z - math.log(aspect)) / 3
            log_z = log_rho + math.log(aspect)
        else:  # rho_tf = aspect * z_tf
            log_z = (log_r2z - 2 * math.log(aspect)) / 3
            log_rho = log_z + math.log(aspect)
        trap = PowerLawTrap(
            alpha, beta,
            math.exp(logmu - alpha * log_rho),
            math.exp(logmu - beta * log_z),
        )
    assert trap.u_perp > 0 and trap.u_z > 0
    return TrapConfiguration(kind, int(ell), trap, (), aspect)


@dataclass(frozen=True)
class BeamWaist:
    role: str  # "circular" (propagates along z) or "sheet"
    ell: int
    waist: float
    ring_radius: float
    approximate: bool  # circular-beam formula applied to the light sheet


def required_waist(config: TrapConfiguration, power, detuning, sp: AtomSpecies):
    """Waist and ring radius each beam needs to produce the trap coefficients.

    Both beams get the same power and detuning.  The light sheet is
    treated with the circular-beam power law, flagged ``approximate``.
    """
    if not (power > 0 and detuning > 0):
        raise ValueError("power and detuning must be positive")
    t = config.trap
    out = []
    for role, expo, u in (("circular", t.alpha, t.u_perp), ("sheet", t.beta, t.u_z)):
        ell = expo // 2
        w = optics.waist_for_coefficient(u, ell, power, detuning, sp)
        out.append(BeamWaist(role, ell, w, w * math.sqrt(ell / 2), role == "sheet"))
    return tuple(out)


def primary_beam(config: TrapConfiguration, waists):
    """The beam carrying the configuration's LG index (the power-law one)."""
    if config.kind is Kind.OneD_LG:
        return waists[1]
    return waists[0]


def with_beams(config: TrapConfiguration, power, detuning, sp: AtomSpecies, wavelength=760.4e-9):
    ws = required_waist(config, power, detuning, sp)
    beams = tuple(optics.LGBeam(w.ell, power, w.waist, detuning, wavelength) for w in ws)
    return TrapConfiguration(config.kind, config.ell, config.trap, beams, config.aspect)
