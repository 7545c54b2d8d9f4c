"""Condensate growth from a non-depletable thermal bath.

The condensate number obeys

    dN_c/dt = 2 W+ [(1 - exp((mu_c - mu)/kT)) N_c + 1],

with mu_c the Thomas-Fermi chemical potential of N_c atoms and W+ the
scattering rate into the condensate mode.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import Boltzmann as KB
from scipy.constants import hbar, pi
from scipy.integrate import solve_ivp

from . import kernels
from .species import AtomSpecies, interaction_strength
from .thermo import tc_interacting
from .trap import PowerLawTrap, mu_thomas_fermi

SERIES_RTOL = 1e-12
SERIES_MAX_TERMS = 1_000_000
DEFAULT_THRESHOLD = 0.9
# integration stops once N_c is this close to n_eq
SATURATION_GAP = 1e-3
MAX_VALID_FRACTION = 0.1


class GrowthError(RuntimeError):
    pass


@dataclass(frozen=True)
class GrowthParams:
    temperature: float
    mu_bath: float
    n_eq: float
    trap: PowerLawTrap
    species: AtomSpecies
    n_atoms: float = math.nan
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")
        if not self.n_eq >= 1:
            raise ValueError("n_eq must be >= 1")
        if not self.mu_bath > 0:
            raise ValueError("bath chemical potential must be positive")
        phi = bath_fugacity(self)
        if not 0 < phi < 1:
            raise ValueError(f"bath fugacity {phi} outside (0, 1)")

    @property
    def kt(self):
        return KB * self.temperature

    @property
    def g(self):
        return interaction_strength(self.species)

    @classmethod
    def from_fraction(cls, trap: PowerLawTrap, sp: AtomSpecies, n_atoms, f_eq=0.1, coeffs=None):
        """Working point from the equilibrium condensate fraction.

        T = Tc (1 - f_eq)^(1/(eta+1)) with the interacting Tc, and the
        bath chemical potential is mu_TF(f_eq N) so that growth saturates
        at N_c = f_eq N.
        """
        if not 0 < f_eq < 1:
            raise ValueError("f_eq must be in (0, 1)")
        if f_eq > MAX_VALID_FRACTION:
            warnings.warn(
                f"f_eq = {f_eq} exceeds {MAX_VALID_FRACTION}; the non-depletable bath model is unreliable",
                stacklevel=2,
            )
        tc = tc_interacting(trap, n_atoms, sp, coeffs)
        t = tc * (1 - f_eq) ** (1 / (trap.eta + 1))
        n_eq = f_eq * n_atoms
        mu = mu_thomas_fermi(trap, n_eq, interaction_strength(sp))
        meta = {"Tc_K": tc, "f_eq": f_eq, "closure": "T = Tc (1 - f_eq)^(1/(eta+1)); mu = mu_TF(f_eq N)"}
        return cls(t, mu, n_eq, trap, sp, n_atoms, meta)


def growth_coefficient(T, sp: AtomSpecies):
    """C(T) = 4 m (a_s k_B T)^2 / (pi hbar^3), in 1/s."""
    if not T > 0:
        raise ValueError("T must be positive")
    return 4 * sp.mass * (sp.a_s * KB * T) ** 2 / (pi * hbar**3)


def bath_fugacity(params: GrowthParams):
    """phi = exp((mu - 2 mu_TF(n_eq)) / kT)."""
    mu_eq = mu_thomas_fermi(params.trap, params.n_eq, interaction_strength(params.species))
    return math.exp((params.mu_bath - 2 * mu_eq) / (KB * params.temperature))


def condensate_mu(params: GrowthParams, n_c):
    """mu_TF(n_c), with mu_TF(0) = 0."""
    if n_c <= 0:
        return 0.0
    return mu_thomas_fermi(params.trap, n_c, params.g)


def _series_args(params: GrowthParams, n_c):
    kt = params.kt
    phi = bath_fugacity(params)
    expo = (condensate_mu(params, n_c) - params.mu_bath) / kt
    saturated = expo >= 0
    return math.log1p(-phi), phi, math.exp(min(expo, 0.0)), saturated


def growth_rate(params: GrowthParams, n_c, rtol=SERIES_RTOL, return_info=False):
    """W+ in 1/s at condensate number n_c.

    The p-series stops when the next term drops below rtol of the running
    sum.  At or past saturation (mu_c >= mu) the exponent is clamped to 0
    and ``saturated`` is reported in the info dict.
    """
    log_term, phi, x, saturated = _series_args(params, n_c)
    total, nterms = kernels.growth_series(log_term, phi, x, rtol, SERIES_MAX_TERMS)
    if nterms >= SERIES_MAX_TERMS:
        raise GrowthError(f"W+ series did not converge in {SERIES_MAX_TERMS} terms (phi={phi}, x={x})")
    w = growth_coefficient(params.temperature, params.species) * total
    if return_info:
        return w, {"terms": nterms, "saturated": saturated}
    return w


def growth_rate_bruteforce(params: GrowthParams, n_c, n_terms=10_000):
    """W+ with a fixed number of series terms (reference for truncation tests)."""
    log_term, phi, x, _ = _series_args(params, n_c)
    return growth_coefficient(params.temperature, params.species) * kernels.growth_series_fixed(
        log_term, phi, x, n_terms
    )


def growth_derivative(params: GrowthParams, n_c):
    """dN_c/dt."""
    expo = (condensate_mu(params, n_c) - params.mu_bath) / params.kt
    return 2 * growth_rate(params, n_c) * (-math.expm1(expo) * n_c + 1)


@dataclass
class GrowthSeries:
    times: np.ndarray
    n_c: np.ndarray
    params: GrowthParams
    saturated: bool
    rtol: float
    dense: object = None

    @property
    def fraction(self):
        """N_c / N (N_c / n_eq when the total atom number is unknown)."""
        n = self.params.n_atoms
        return self.n_c / (n if math.isfinite(n) else self.params.n_eq)


def simulate_growth(params: GrowthParams, t_end, rtol=1e-8, stop_at_saturation=True):
    """Integrate the rate equation from N_c(0) = 0.

    Adaptive Runge-Kutta (DOP853).  With stop_at_saturation the run ends
    once N_c >= (1 - SATURATION_GAP) n_eq, otherwise at t_end.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    n_eq = params.n_eq

    def rhs(_t, y):
        return [growth_derivative(params, y[0])]

    def reached(_t, y):
        return y[0] - (1 - SATURATION_GAP) * n_eq

    reached.terminal = stop_at_saturation
    reached.direction = 1
    sol = solve_ivp(
        rhs, (0.0, t_end), [0.0], method="DOP853", rtol=rtol, atol=rtol * 1e-3,
        events=reached, dense_output=True,
    )
    if sol.status == -1:
        raise GrowthError(f"integration failed at t={sol.t[-1]:.6g} s, N_c={sol.y[0, -1]:.6g}: {sol.message}")
    n = np.maximum.accumulate(sol.y[0])
    saturated = bool(len(sol.t_events[0]))
    return GrowthSeries(sol.t, n, params, saturated, rtol, sol.sol)


def condensation_time(series: GrowthSeries, threshold=DEFAULT_THRESHOLD):
    """First time with N_c >= threshold * n_eq."""
    if not 0 < threshold < 1:
        raise ValueError("threshold must be in (0, 1)")
    target = threshold * series.params.n_eq
    above = np.flatnonzero(series.n_c >= target)
    if not series.saturated or not len(above):
        raise GrowthError("series did not reach saturation")
    i = above[0]
    if i == 0:
        return float(series.times[0])
    a, b = float(series.times[i - 1]), float(series.times[i])
    if series.dense is None:
        na, nb = series.n_c[i - 1], series.n_c[i]
        return a + (b - a) * (target - na) / (nb - na)
    # bisection on the dense interpolant between the bracketing steps
    for _ in range(200):
        m = 0.5 * (a + b)
        if series.dense(m)[0] >= target:
            b = m
        else:
            a = m
        if b - a <= 1e-15 * b:
            break
    return 0.5 * (a + b)


def write_series(series: GrowthSeries, path, header=()):
    """Two-column text file: t_seconds, Nc_over_N, with '#' metadata."""
    p = series.params
    lines = [f"# {h}" for h in header]
    lines += [
        f"# T_K = {p.temperature:.12g}",
        f"# mu_bath_J = {p.mu_bath:.12g}",
        f"# n_eq = {p.n_eq:.12g}",
        f"# n_atoms = {p.n_atoms:.12g}",
        f"# rtol = {series.rtol:g}",
        f"# series_rtol = {SERIES_RTOL:g}",
        f"# saturation_gap = {SATURATION_GAP:g}",
        "# t_seconds Nc_over_N",
    ]
    lines += [f"{t:.10e} {f:.10e}" for t, f in zip(series.times, series.fraction)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
