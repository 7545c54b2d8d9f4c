"""Gross-Pitaevskii ground state on a cylindrically symmetric (rho, z) grid.

Discretization: cell-centred nodes rho_i = (i + 1/2) d_rho and
z_j = -z_max + (j + 1/2) d_z.  The kinetic energy is the quadratic form
sum over cell faces of face-area x (fourth-order staggered derivative)^2,
with ghost cells mirrored evenly across the axis and oddly across the outer
faces (psi = 0 there).  The operator is the gradient of that form, hence
symmetric in the volume-weighted inner product, and fourth-order accurate.
Cell volumes are 2 pi rho_i d_rho d_z except on the axis row, where the
end correction 11/24 d_rho^2 replaces d_rho^2 / 2.

Relaxation: the normalized wave function follows imaginary-time descent
on the unit sphere.  The default scheme accelerates it with nonlinear
conjugate gradients, preconditioned by (c + T)^-1 (T the discrete kinetic
operator, inverted by fast diagonalization), and moves along the great
circle psi cos(t) + d sin(t) to the exact energy minimum; the energy along
that circle is a trigonometric polynomial whose coefficients are a few
inner products.  The "descent" scheme takes plain preconditioned
imaginary-time steps with step halving on any energy increase.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import hbar
from scipy.linalg import eigh
from scipy.optimize import brentq

from . import kernels
from .species import AtomSpecies, interaction_strength
from .trap import PowerLawTrap, half_widths, mu_thomas_fermi, potential

MIN_POINTS = 32
GRID_MARGIN = 1.5
ENERGY_SLACK = 1e-12
# midpoint rule for int_0 rho f d_rho loses f(0) d^2 / 24 at the axis
AXIS_WEIGHT = 11 / 24
# staggered fourth-order first derivative on cells f-1 .. f+2
_D4 = np.array([1.0, -27.0, 27.0, -1.0]) / 24


class GridError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class CylGrid:
    rho_max: float
    z_max: float
    n_rho: int
    n_z: int

    def __post_init__(self):
        if self.n_rho < MIN_POINTS or self.n_z < MIN_POINTS:
            raise GridError(f"need n_rho, n_z >= {MIN_POINTS}")
        if not (self.rho_max > 0 and self.z_max > 0):
            raise GridError("grid extents must be positive")

    @property
    def d_rho(self):
        return self.rho_max / self.n_rho

    @property
    def d_z(self):
        return 2 * self.z_max / self.n_z

    @property
    def rho(self):
        return (np.arange(self.n_rho) + 0.5) * self.d_rho

    @property
    def z(self):
        return -self.z_max + (np.arange(self.n_z) + 0.5) * self.d_z

    def mesh(self):
        return np.meshgrid(self.rho, self.z, indexing="ij")

    @property
    def radial_weights(self):
        """Quadrature weights for integral rho f(rho) d_rho over the cells."""
        w = self.rho * self.d_rho
        w[0] = AXIS_WEIGHT * self.d_rho**2
        return w

    @property
    def weights(self):
        """Volume of each cell ring, 2 pi rho d_rho d_z (axis row corrected)."""
        return np.repeat((2 * math.pi * self.d_z) * self.radial_weights[:, None], self.n_z, axis=1)

    def refined(self, factor=2):
        return CylGrid(self.rho_max, self.z_max, self.n_rho * factor, self.n_z * factor)


@dataclass
class CylField:
    values: np.ndarray
    grid: CylGrid

    def norm(self):
        return float(np.sum(self.grid.weights * self.values**2))

    def density(self):
        return self.values**2


@dataclass
class GroundStateResult:
    psi: CylField
    mu_c: float
    energy: float
    iterations: int
    residual: float
    trap: PowerLawTrap
    n_c: float
    energies: np.ndarray = field(repr=False, default=None)
    meta: dict = field(default_factory=dict)

    def metadata(self):
        out = {
            "mu_c_J": self.mu_c,
            "energy_per_atom_J": self.energy,
            "iterations": self.iterations,
            "residual": self.residual,
            "n_c": self.n_c,
        }
        out.update(self.meta)
        return out


def _face_gradient(n, h, lower_sign):
    """Derivative at faces f = -1/2 .. n - 1/2 from n cell values.

    Ghost cells mirror across each end face with the given sign (+1 even,
    -1 odd); the upper end is always odd (psi = 0 on the outer face).
    """
    g = np.zeros((n + 1, n))
    for f in range(n + 1):  # face between cells f - 1 and f
        for c, coef in zip(range(f - 2, f + 2), _D4):
            if c < 0:
                g[f, -c - 1] += lower_sign * coef / h
            elif c >= n:
                g[f, 2 * n - 1 - c] -= coef / h
            else:
                g[f, c] += coef / h
    return g


def _bands(k):
    n = k.shape[0]
    out = np.zeros((n, 7))
    for s in range(-3, 4):
        d = np.diagonal(k, s)
        if s >= 0:
            out[: n - s, s + 3] = d
        else:
            out[-s:, s + 3] = d
    assert np.allclose(k, sum(np.diag(np.diagonal(k, s), s) for s in range(-3, 4)), rtol=0, atol=1e-12 * abs(k).max())
    return np.ascontiguousarray(out)


class _Operator:
    """Discrete -hbar^2/2m Laplacian + V and its kinetic preconditioner."""

    def __init__(self, grid: CylGrid, trap: PowerLawTrap, mass):
        self.grid = grid
        k = hbar**2 / (2 * mass)
        # radial: faces at rho = f d_rho; the axis face carries no area
        gr = _face_gradient(grid.n_rho, grid.d_rho, +1)
        area = np.arange(grid.n_rho + 1) * grid.d_rho * grid.d_rho
        area[-1] *= 0.5
        self.wr = grid.radial_weights
        sr = k * gr.T @ (area[:, None] * gr)
        # axial: uniform faces, half weight on the two boundary faces
        gz = _face_gradient(grid.n_z, grid.d_z, -1)
        length = np.full(grid.n_z + 1, grid.d_z)
        length[[0, -1]] *= 0.5
        sz = k * gz.T @ (length[:, None] * gz) / grid.d_z
        self.kr = _bands(sr / self.wr[:, None])
        self.kz = _bands(sz)
        self.lam_r, self.vr = eigh(sr, np.diag(self.wr))
        self.lam_z, self.qz = eigh(sz)
        self.wr_col = self.wr[:, None]
        R, Z = grid.mesh()
        self.v = np.ascontiguousarray(potential(trap, R, Z))
        self.w = grid.weights
        self._zeros = np.zeros_like(self.v)

    def kinetic_only(self, psi):
        out = np.empty_like(psi)
        return kernels.apply_hamiltonian(psi, self._zeros, self.kr, self.kz, out)

    def linear(self, psi):
        out = np.empty_like(psi)
        return kernels.apply_hamiltonian(psi, self.v, self.kr, self.kz, out)

    def precondition(self, r, shift):
        """(shift + T)^-1 r."""
        a = self.vr.T @ (self.wr_col * r) @ self.qz
        a /= shift + self.lam_r[:, None] + self.lam_z[None, :]
        return self.vr @ a @ self.qz.T

    def dot(self, a, b):
        return float(np.sum(self.w * a * b))


def thomas_fermi_extent(trap: PowerLawTrap, n_c, sp: AtomSpecies):
    g = interaction_strength(sp)
    return half_widths(trap, mu_thomas_fermi(trap, n_c, g))


def default_grid(trap: PowerLawTrap, n_c, sp: AtomSpecies, n_rho=128, n_z=256, margin=1.6):
    """Grid covering margin x the Thomas-Fermi half-widths (g > 0).

    For g = 0 the extent is set by the single-particle length
    (hbar^2 / m U)^(1/(alpha+2)) in each direction, times 4.5.
    """
    if sp.a_s > 0:
        rho_tf, z_tf = thomas_fermi_extent(trap, n_c, sp)
        return CylGrid(margin * rho_tf, margin * z_tf, n_rho, n_z)
    a_r = (hbar**2 / (sp.mass * trap.u_perp)) ** (1 / (trap.alpha + 2))
    a_z = (hbar**2 / (sp.mass * trap.u_z)) ** (1 / (trap.beta + 2))
    return CylGrid(4.5 * a_r, 4.5 * a_z, n_rho, n_z)


def check_grid(grid: CylGrid, trap: PowerLawTrap, n_c, sp: AtomSpecies):
    if sp.a_s <= 0:
        return
    rho_tf, z_tf = thomas_fermi_extent(trap, n_c, sp)
    if grid.rho_max < GRID_MARGIN * rho_tf or grid.z_max < GRID_MARGIN * z_tf:
        raise GridError(
            f"grid ({grid.rho_max:.3g}, {grid.z_max:.3g}) m must exceed {GRID_MARGIN} x the "
            f"Thomas-Fermi half-widths ({rho_tf:.3g}, {z_tf:.3g}) m"
        )


def _initial_state(op: _Operator, trap, n_c, sp):
    grid = op.grid
    R, Z = grid.mesh()
    g = interaction_strength(sp)
    if g > 0:
        mu = mu_thomas_fermi(trap, n_c, g)
        dens = np.maximum(mu - op.v, 0.0)
        dens += 1e-6 * dens.max()
        psi = np.sqrt(dens)
    else:
        psi = np.exp(-((R / (grid.rho_max / 4)) ** 2 + (Z / (grid.z_max / 4)) ** 2))
    return psi / math.sqrt(op.dot(psi, psi))


def _energy_terms(op, psi, lpsi, gn):
    d2 = psi * psi
    quart = op.dot(d2, d2)
    lin = op.dot(psi, lpsi)
    return lin + 0.5 * gn * quart, lin + gn * quart


def solve_ground_state(
    trap: PowerLawTrap,
    n_c,
    sp: AtomSpecies,
    grid: CylGrid | None = None,
    tol=1e-9,
    max_iter=100_000,
    scheme="cg",
):
    """Ground state of the GP functional for n_c atoms.

    Converges when |H psi - mu psi| / |mu psi| <= tol.  ``scheme`` is "cg"
    (default) or "descent"; see the module docstring.
    """
    if not 1e-12 <= tol <= 1e-4:
        raise ValueError("tol must be in [1e-12, 1e-4]")
    if scheme not in ("cg", "descent"):
        raise ValueError("scheme must be 'cg' or 'descent'")
    if grid is None:
        grid = default_grid(trap, n_c, sp)
    check_grid(grid, trap, n_c, sp)
    gn = interaction_strength(sp) * n_c
    op = _Operator(grid, trap, sp.mass)
    psi = _initial_state(op, trap, n_c, sp)
    lpsi = op.linear(psi)
    energy, mu = _energy_terms(op, psi, lpsi, gn)
    shift = abs(mu)
    energies = [energy]
    meta = {"scheme": scheme}
    if scheme == "descent":
        mu_ref = mu_thomas_fermi(trap, n_c, interaction_strength(sp)) if gn > 0 else mu
        dt = 0.1 * hbar / mu_ref
        meta.update({"dt_initial_s": dt, "dt_rule": "start 0.1 hbar/mu_TF, halve on energy increase"})
    else:
        meta.update({"line_search": "exact along great circle", "preconditioner_shift_J": shift})

    d_old = z_old = r_old = None
    residual = math.inf
    for it in range(max_iter + 1):
        hpsi = lpsi + gn * psi**3
        mu = op.dot(psi, hpsi)
        r = hpsi - mu * psi
        residual = math.sqrt(op.dot(r, r)) / abs(mu)
        if residual <= tol:
            break
        if it == max_iter:
            raise ConvergenceError(f"no convergence in {max_iter} iterations", residual)
        z = op.precondition(r, shift)
        z -= op.dot(psi, z) * psi
        if scheme == "descent":
            psi, lpsi, energy, dt = _descent_step(op, psi, z, energy, dt, gn, shift)
            if dt < 1e-30:
                raise ConvergenceError("imaginary-time step underflow", residual)
        else:
            beta = 0.0
            if d_old is not None:
                beta = max(0.0, op.dot(r - r_old, z) / op.dot(r_old, z_old))
            d = -z if d_old is None else -z + beta * d_old
            d -= op.dot(psi, d) * psi
            if op.dot(d, r) >= 0:
                d = -z
            dhat = d / math.sqrt(op.dot(d, d))
            psi, lpsi, energy = _line_search(op, psi, lpsi, dhat, gn)
            d_old, z_old, r_old = d, z, r
        if energy > energies[-1] + ENERGY_SLACK * abs(energies[-1]):
            raise ConvergenceError(f"energy increased at iteration {it}", residual)
        energies.append(energy)

    energy, mu = _energy_terms(op, psi, lpsi, gn)
    if scheme == "descent":
        meta["dt_final_s"] = dt
    return GroundStateResult(
        CylField(psi, grid), mu, energy, it, residual, trap, n_c, np.array(energies), meta
    )


def _line_search(op, psi, lpsi, d, gn):
    ld = op.linear(d)
    a = op.dot(psi, lpsi)
    b = op.dot(psi, ld)
    c = op.dot(d, ld)
    p2 = psi * psi
    d2 = d * d
    pd = psi * d
    m = (op.dot(p2, p2), op.dot(p2, pd), op.dot(p2, d2), op.dot(pd, d2), op.dot(d2, d2))

    def e(t):
        co, si = math.cos(t), math.sin(t)
        lin = co * co * a + 2 * co * si * b + si * si * c
        quart = (co**4 * m[0] + 4 * co**3 * si * m[1] + 6 * co * co * si * si * m[2]
                 + 4 * co * si**3 * m[3] + si**4 * m[4])
        return lin + 0.5 * gn * quart

    # the minimum is located as a root of dE/dt: energy differences are only
    # resolved to sqrt(machine eps) in t, the slope to machine eps
    def de(t):
        co, si = math.cos(t), math.sin(t)
        lin = 2 * co * si * (c - a) + 2 * (co * co - si * si) * b
        quart = (-4 * co**3 * si * m[0] + 4 * (co**4 - 3 * co * co * si * si) * m[1]
                 + 12 * (co**3 * si - co * si**3) * m[2] + 4 * (3 * co * co * si * si - si**4) * m[3]
                 + 4 * si**3 * co * m[4])
        return lin + 0.5 * gn * quart

    ts = np.linspace(-0.5 * math.pi, 0.5 * math.pi, 181)
    k = int(np.argmin([e(t) for t in ts]))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]
    if de(lo) < 0 < de(hi):
        t = brentq(de, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    else:
        t = ts[k]
    co, si = math.cos(t), math.sin(t)
    new = co * psi + si * d
    new /= math.sqrt(op.dot(new, new))
    lnew = op.linear(new)
    energy, _ = _energy_terms(op, new, lnew, gn)
    return new, lnew, energy


def _descent_step(op, psi, z, energy, dt, gn, shift):
    """psi <- psi - (dt/hbar) shift (shift + T)^-1 (H - mu) psi, renormalized."""
    while dt > 1e-30:
        new = psi - (dt / hbar) * shift * z
        new /= math.sqrt(op.dot(new, new))
        lnew = op.linear(new)
        e_new, _ = _energy_terms(op, new, lnew, gn)
        if e_new <= energy + ENERGY_SLACK * abs(energy):
            return new, lnew, e_new, dt
        dt *= 0.5
    return psi, op.linear(psi), energy, dt


def energy_components(result: GroundStateResult, sp: AtomSpecies):
    """Per-atom kinetic, potential and interaction energies."""
    op = _Operator(result.psi.grid, result.trap, sp.mass)
    psi = result.psi.values
    gn = interaction_strength(sp) * result.n_c
    kin = op.dot(psi, op.kinetic_only(psi))
    pot = op.dot(psi, op.v * psi)
    d2 = psi * psi
    return {"kinetic": kin, "potential": pot, "interaction": 0.5 * gn * op.dot(d2, d2)}


def iso_density_levels(result: GroundStateResult, fractions):
    """Contours |psi|^2 = f max|psi|^2 in the (rho, z) half-plane.

    Returns {f: [array of shape (k, 2) with columns rho, z], ...}.  f = 1
    gives the single grid point of the maximum; f > 1 gives no contour.
    """
    import contourpy

    dens = result.psi.density()
    grid = result.psi.grid
    peak = dens.max()
    gen = contourpy.contour_generator(grid.z, grid.rho, dens, line_type="Separate")
    out = {}
    for f in fractions:
        f = float(f)
        if f <= 0:
            raise ValueError("fractions must be positive")
        if f > 1:
            out[f] = []
        elif f == 1:
            i, j = np.unravel_index(np.argmax(dens), dens.shape)
            out[f] = [np.array([[grid.rho[i], grid.z[j]]])]
        else:
            # contourpy works in (x, y) = (z, rho); swap to (rho, z)
            out[f] = [seg[:, ::-1].copy() for seg in gen.lines(f * peak)]
    return out


def contour_aspect(segments):
    """z extent over rho extent of a contour set (rho measured from the axis)."""
    if not segments:
        return math.nan
    pts = np.vstack(segments)
    return float((pts[:, 1].max() - pts[:, 1].min()) / (2 * pts[:, 0].max()))


def flatness_metric(result: GroundStateResult, weighting="area"):
    """std/mean of |psi|^2 over the cells with V <= mu_c / 2.

    "area" treats every (rho, z) sample of the uniform grid alike, i.e. the
    statistic over the meridional half-plane; "volume" weights each cell by
    its ring volume.
    """
    grid = result.psi.grid
    R, Z = grid.mesh()
    mask = potential(result.trap, R, Z) <= 0.5 * result.mu_c
    if not mask.any():
        raise ValueError("no grid cell has V <= mu_c / 2")
    d = result.psi.density()[mask]
    if weighting == "area":
        w = np.ones_like(d)
    elif weighting == "volume":
        w = grid.weights[mask]
    else:
        raise ValueError("weighting must be 'area' or 'volume'")
    mean = np.sum(w * d) / np.sum(w)
    var = np.sum(w * (d - mean) ** 2) / np.sum(w)
    return float(math.sqrt(var) / mean)


def write_density(result: GroundStateResult, path, meta_path=None, extra=None):
    """Text grid of |psi|^2 (m^-3, per atom) plus a JSON metadata sidecar."""
    grid = result.psi.grid
    dens = result.psi.density()
    header = [
        f"# n_rho = {grid.n_rho}",
        f"# n_z = {grid.n_z}",
        f"# d_rho_m = {grid.d_rho:.12e}",
        f"# d_z_m = {grid.d_z:.12e}",
        f"# rho_0_m = {grid.rho[0]:.12e}",
        f"# z_0_m = {grid.z[0]:.12e}",
        "# units = m^-3 (|psi|^2, normalized to 1)",
        "# layout = row-major, rows rho, columns z",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(header) + "\n")
        np.savetxt(fh, dens, fmt="%.10e")
    if meta_path is not None:
        meta = result.metadata()
        if extra:
            meta.update(extra)
        with open(meta_path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
