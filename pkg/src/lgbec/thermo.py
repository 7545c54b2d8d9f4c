"""Ideal and weakly interacting Bose gas in a power-law trap.

Semiclassical density of states, equation of state, the condensation
temperature with its interaction shift, and the populations of the first
few levels of a 1D power-law well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.constants import Boltzmann as KB
from scipy.constants import h, hbar
from scipy.interpolate import PchipInterpolator
from scipy.linalg import eigh
from scipy.optimize import brentq
from scipy.special import gammaln

from .bose import bose_g, zeta
from .species import AtomSpecies
from .trap import PowerLawTrap, log_c_alpha_beta, trap_volume

Q_MAX = 0.1
INF = "INF"
# beyond this the x^(2 ell) matrix elements swamp the eigensolver; the box
# limit is the better model there anyway
MAX_LEVEL_ELL = 12


def _check_t(T):
    if not (np.all(np.asarray(T) > 0) and np.all(np.isfinite(T))):
        raise ValueError("temperature must be positive")


def thermal_wavelength(T, mass):
    """lambda_T = h / sqrt(2 pi m k_B T)."""
    _check_t(T)
    return h / np.sqrt(2 * math.pi * mass * KB * np.asarray(T, dtype=float))


def peak_density_onset(T, mass):
    """Peak density zeta(3/2) / lambda_T^3 at the onset of condensation."""
    return zeta(1.5) / thermal_wavelength(T, mass) ** 3


def _log_state_prefactor(trap: PowerLawTrap, mass):
    # log of m^(3/2) C_ab / (sqrt(2 pi) hbar^3)
    return 1.5 * math.log(mass) + log_c_alpha_beta(trap) - 0.5 * math.log(2 * math.pi) - 3 * math.log(hbar)


def density_of_states(trap: PowerLawTrap, epsilon, mass):
    """Semiclassical g(eps) in states per joule."""
    epsilon = np.asarray(epsilon, dtype=float)
    if np.any(epsilon <= 0):
        raise ValueError("epsilon must be positive")
    eta = trap.eta
    out = np.exp(_log_state_prefactor(trap, mass) - float(gammaln(eta + 1)) + eta * np.log(epsilon))
    return out if out.ndim else float(out)


def saturated_thermal_number(trap: PowerLawTrap, T, mass):
    """Thermal atoms at fugacity 1: (k_B T)^(eta+1) prefactor * zeta(eta+1)."""
    eta = trap.eta
    return math.exp(_log_state_prefactor(trap, mass) + (eta + 1) * math.log(KB * T)) * zeta(eta + 1)


def eos_total_number(trap: PowerLawTrap, T, mu, mass):
    """Atom number at temperature T and chemical potential mu <= 0.

    The ground-state term f/(1-f) is dropped at f = 1, where the condensate
    is accounted for separately.
    """
    _check_t(T)
    kt = KB * T
    if mu > 0:
        raise ValueError(f"fugacity exp(mu/kT) = {math.exp(mu / kt):.6g} > 1")
    f = math.exp(mu / kt)
    eta = trap.eta
    lam = thermal_wavelength(T, mass)
    thermal = trap_volume(trap, kt) / lam**3 * math.exp(gammaln(eta + 0.5)) * bose_g(eta + 1, f)
    if mu == 0:
        return thermal
    return f / -math.expm1(mu / kt) + thermal


def tc_ideal(trap: PowerLawTrap, n_atoms, mass):
    """Ideal-gas condensation temperature in K."""
    if not n_atoms >= 1:
        raise ValueError("n_atoms must be >= 1")
    eta = trap.eta
    log_kt = (math.log(n_atoms) - _log_state_prefactor(trap, mass) - math.log(zeta(eta + 1))) / (eta + 1)
    return math.exp(log_kt) / KB


class PerturbativeRegimeError(ValueError):
    def __init__(self, q):
        self.q = q
        super().__init__(f"q = a_s / lambda_T = {q:.4g} is outside the perturbative regime (q < {Q_MAX})")


@dataclass(frozen=True)
class TcCorrectionCoefficients:
    """Tabulated D1(eta), D1'(eta), D2(eta) with monotone cubic interpolation."""

    eta: tuple
    d1: tuple
    d1_prime: tuple
    d2: tuple
    source: str = ""

    def __post_init__(self):
        e = np.asarray(self.eta, dtype=float)
        if len(e) < 2 or np.any(np.diff(e) <= 0):
            raise ValueError("eta column must be strictly increasing with >= 2 rows")
        for col in (self.d1, self.d1_prime, self.d2):
            if len(col) != len(e) or not np.all(np.isfinite(col)):
                raise ValueError("coefficient columns must be finite and match eta")
        if e[0] > 0.55 or e[-1] < 2.0:
            raise ValueError(f"table covers [{e[0]}, {e[-1]}], need [0.5, 2]")
        interp = {k: PchipInterpolator(e, getattr(self, k)) for k in ("d1", "d1_prime", "d2")}
        object.__setattr__(self, "_interp", interp)

    @classmethod
    def parse(cls, text, source=""):
        rows = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                rows.append([float(x) for x in line.split()])
        ncol = {len(r) for r in rows}
        if ncol not in ({3}, {4}):
            raise ValueError("coefficient table needs 3 or 4 numeric columns on every row")
        arr = np.array(rows)
        d2 = arr[:, 3] if arr.shape[1] == 4 else np.zeros(len(arr))
        return cls(tuple(arr[:, 0]), tuple(arr[:, 1]), tuple(arr[:, 2]), tuple(d2), source)

    @classmethod
    def load(cls, path=None):
        """Read a coefficient table; None gives the shipped Hartree-Fock table."""
        if path is None:
            text = resources.files("lgbec").joinpath("data/tc_coefficients.dat").read_text()
            return cls.parse(text, "lgbec/data/tc_coefficients.dat")
        return cls.parse(Path(path).read_text(), str(path))

    def __call__(self, eta):
        """(D1, D1', D2) at eta."""
        if not 0.5 <= eta <= 2.0:
            raise ValueError(f"eta = {eta} outside [0.5, 2]")
        return tuple(float(self._interp[k](eta)) for k in ("d1", "d1_prime", "d2"))


def interaction_parameter(trap: PowerLawTrap, n_atoms, sp: AtomSpecies):
    """q = a_s / lambda_T evaluated at the ideal-gas Tc."""
    return sp.a_s / float(thermal_wavelength(tc_ideal(trap, n_atoms, sp.mass), sp.mass))


def tc_shift_factor(eta, q, coeffs: TcCorrectionCoefficients, include_d2=True):
    if q >= Q_MAX:
        raise PerturbativeRegimeError(q)
    d1, d1p, d2 = coeffs(eta)
    return 1 + d1 * q + d1p * q ** (2 * eta) + (d2 * q * q if include_d2 else 0.0)


def tc_interacting(trap: PowerLawTrap, n_atoms, sp: AtomSpecies, coeffs=None, include_d2=True):
    """Critical temperature (K) with the interaction shift to second order in q."""
    if coeffs is None:
        coeffs = default_coefficients()
    tc0 = tc_ideal(trap, n_atoms, sp.mass)
    q = interaction_parameter(trap, n_atoms, sp)
    if q == 0:
        return tc0
    return tc_shift_factor(trap.eta, q, coeffs, include_d2) * tc0


_DEFAULT = None


def default_coefficients():
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = TcCorrectionCoefficients.load()
    return _DEFAULT


# --- 1D level populations -------------------------------------------------


@dataclass(frozen=True)
class LevelSpectrum:
    """Lowest levels of -1/2 d^2/dx^2 + u x^(2 ell) (or a box).

    Energies are in units of hbar_omega and ground_halfwidth in units of
    the harmonic length, both taken from the harmonic reference whose
    ground-state turning points are matched.
    """

    energies: tuple
    ell: object
    ground_halfwidth: float = 1.0

    def __post_init__(self):
        e = np.asarray(self.energies)
        if not (e[0] > 0 and np.all(np.diff(e) > 0)):
            raise ValueError("energies must be positive and strictly increasing")


class EigenSolverError(RuntimeError):
    pass


class SaturationError(RuntimeError):
    pass


def _sinc_dvr_levels(potential, x_max, n_levels, n_points):
    """Lowest eigenvalues of -1/2 d^2/dx^2 + potential(x) by sinc DVR on [-x_max, x_max]."""
    x = np.linspace(-x_max, x_max, n_points)
    dx = x[1] - x[0]
    k = np.arange(n_points)
    diff = k[:, None] - k[None, :]
    with np.errstate(divide="ignore"):
        t = np.where(diff == 0, math.pi**2 / 3, 2.0 / np.where(diff == 0, 1, diff) ** 2)
    t *= np.where(diff % 2 == 0, 1.0, -1.0) / (2 * dx * dx)
    t[np.diag_indices(n_points)] += potential(x)
    w, v = eigh(t, subset_by_index=(0, n_levels - 1))
    edge = np.max(np.abs(v[[0, 1, -2, -1], :]))
    return w, edge


def _numeric_levels(ell, n_levels, tol=1e-10):
    """Lowest n_levels eigenvalues of -1/2 d2/dx2 + x^(2 ell)."""
    pot = lambda x: x ** (2 * ell)  # noqa: E731
    # rough WKB bound on the top level sets the window and the spacing
    e_top = 2.0 * (n_levels + 1) ** (2 * ell / (ell + 1))
    # window edge where V exceeds e_top by a wide tunnelling margin; a larger
    # window only inflates |H| and with it the eigensolver roundoff
    x_max = 1.1 * (e_top + 200.0) ** (1 / (2 * ell))
    dx = math.pi / math.sqrt(2 * (e_top + 200.0)) / 2
    prev = None
    for _ in range(12):
        w, edge = _sinc_dvr_levels(pot, x_max, n_levels, int(2 * x_max / dx) + 1)
        if prev is not None and edge < 1e-8 and np.max(np.abs(w - prev)) < tol * max(1.0, w[-1]):
            return w
        prev = w
        x_max *= 1.05
        dx /= 1.2
    raise EigenSolverError(f"levels for ell={ell} did not converge")


def level_spectrum_1d(ell, n_levels, method="auto"):
    """Spectrum with the ground state's classical turning points at x = +/-1.

    ell = 1 is the harmonic reference (E_n = n + 1/2).  ell = "INF" is the
    box of half-width 1.  Other ell use a sinc-DVR eigensolve; method
    "numeric" forces it for ell = 1 and for the box as well.
    """
    if n_levels < 2:
        raise ValueError("n_levels must be >= 2")
    n = np.arange(n_levels)
    if ell == INF or ell == math.inf:
        if method == "numeric":
            e = _box_numeric(n_levels)
        else:
            e = math.pi**2 * (n + 1) ** 2 / 8
        return LevelSpectrum(tuple(float(x) for x in e), INF, 1.0)
    if int(ell) != ell or not 1 <= ell <= MAX_LEVEL_ELL:
        raise ValueError(f"ell must be an integer in [1, {MAX_LEVEL_ELL}] or 'INF'")
    ell = int(ell)
    if ell == 1 and method != "numeric":
        return LevelSpectrum(tuple(float(x) for x in n + 0.5), 1, 1.0)
    e = _numeric_levels(ell, n_levels)
    # H_u = -1/2 d2 + u x^(2l) has E_n(u) = u^(1/(l+1)) e_n; the turning
    # point condition u * 1^(2l) = E_0(u) gives u^(l/(l+1)) = e_0
    scale = e[0] ** (1 / ell)
    return LevelSpectrum(tuple(float(x) for x in scale * e), ell, 1.0)


def _box_numeric(n_levels, n_cheb=96):
    """Box of half-width 1 by Chebyshev collocation with Dirichlet walls."""
    n = n_cheb
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.r_[2.0, np.ones(n - 1), 2.0] * (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1 / c) / (dx + np.eye(n + 1))
    d -= np.diag(d.sum(axis=1))
    d2 = (d @ d)[1:-1, 1:-1]
    w = np.linalg.eigvals(-0.5 * d2)
    w = np.sort(w.real[np.abs(w.imag) < 1e-9 * np.abs(w.real)])
    if len(w) < n_levels:
        raise EigenSolverError("collocation returned too few real levels")
    return w[:n_levels]


def bose_occupations(energies, kt, total_number, rel_tol=1e-13):
    """Bose-Einstein occupations of the given levels summing to total_number."""
    e = np.asarray(energies, dtype=float)
    if not kt > 0:
        raise ValueError("kT must be positive")
    if not total_number > 0:
        raise ValueError("total_number must be positive")

    def occupations(mu):
        # levels far above mu overflow expm1 to inf, i.e. occupation 0
        with np.errstate(over="ignore"):
            return 1.0 / np.expm1((e - mu) / kt)

    def excess(log_gap):
        return np.sum(occupations(e[0] - math.exp(log_gap) * kt)) - total_number

    lo, hi = math.log(1e-14), math.log(50.0 + math.log1p(len(e) / total_number))
    if excess(lo) < 0:
        raise SaturationError(f"mu reaches E_0 before {total_number:g} atoms fit in {len(e)} levels")
    log_gap = brentq(excess, lo, hi, xtol=1e-15, rtol=rel_tol, maxiter=500)
    mu = e[0] - math.exp(log_gap) * kt
    return occupations(mu), mu


def level_populations_1d(ell, kt_over_hbar_omega, n_levels, total_number, method="auto"):
    """Populations of the lowest n_levels at k_B T = kt_over_hbar_omega * hbar omega."""
    if not kt_over_hbar_omega > 0:
        raise ValueError("kT / hbar omega must be positive")
    spec = level_spectrum_1d(ell, n_levels, method)
    occ, _ = bose_occupations(spec.energies, kt_over_hbar_omega, total_number)
    return occ
