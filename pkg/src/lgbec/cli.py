"""Command-line front end: one verb per figure-style data product.

Every output file starts with '#' metadata lines (tool version, resolved
config, wall time, model parameters in effect) followed by a data section
that depends only on the resolved config.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import threading
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from scipy.constants import Boltzmann as KB
from scipy.constants import pi

from . import __version__, gpe, heating, kinetics, kernels, optics, thermo
from .species import SpeciesError, interaction_strength, load_species
from .trap import (
    DEFAULT_ASPECT,
    Kind,
    build_configuration,
    condensate_volume,
    half_widths,
    mu_thomas_fermi,
    primary_beam,
    required_waist,
)

EXIT_OK, EXIT_ROW_ERRORS, EXIT_USAGE = 0, 1, 2

DETUNING_PRESET_2PI_GHZ = (10.0, 100.0, 1000.0, 10000.0)
RAYLEIGH_FRACTION = 0.5
ALL_KINDS = ("1D_LG", "2D_LG", "3D_LG")

DEFAULTS = {
    "common": {
        "species": "",
        "kinds": ",".join(ALL_KINDS),
        "ells": "1,2,3,4,5,6",
        "n_atoms": "1e6",
        "vc_um3": "5.3e3",
        "power_W": "5",
        "detuning_2pi_THz": "10",
        "wavelength_nm": "760.4",
        "aspect": str(DEFAULT_ASPECT),
    },
    "tc-sweep": {"coefficients": "", "include_d2": "true"},
    "levels": {"ells": "1,3,6,INF", "kt_over_hbar_omega": "2", "n_levels": "40", "total_number": "10"},
    "scattering": {
        "kinds": "3D_LG",
        "temperature_nK": "1000",
        "detunings_2pi_GHz": ",".join(f"{d:g}" for d in DETUNING_PRESET_2PI_GHZ),
    },
    "waists": {},
    "growth": {"ells": "1,6", "f_eq": "0.1", "threshold": "0.9", "t_end_s": "20", "rtol": "1e-8"},
    "shapes": {
        "ells": "1,6",
        "n_rho": "128",
        "n_z": "256",
        "tol": "1e-9",
        "scheme": "cg",
        "fractions": "0.1,0.5",
        "grid_margin": "1.6",
    },
    "species-check": {},
}


class ConfigError(ValueError):
    pass


# --- configuration -----------------------------------------------------------


def resolve_config(command, config_path=None, overrides=()):
    """Merge built-in defaults, the config file and KEY=VALUE overrides.

    Command sections override [common]; later sources override earlier ones.
    """
    cfg = dict(DEFAULTS["common"])
    cfg.update(DEFAULTS[command])
    if config_path:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        if not parser.read(config_path):
            raise ConfigError(f"config file {config_path} not found")
        for section in ("common", command):
            if parser.has_section(section):
                cfg.update(dict(parser.items(section)))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        k, v = (p.strip() for p in item.split("=", 1))
        cfg[k] = v
    known = set(DEFAULTS["common"]) | set(DEFAULTS[command])
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
    return cfg


def _float(cfg, key):
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(f"{key} = {cfg[key]!r} is not a number") from None


def _floats(cfg, key):
    try:
        out = [float(x) for x in cfg[key].split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{key} = {cfg[key]!r} is not a number list") from None
    if not out:
        raise ConfigError(f"{key} is empty")
    return out


def _ells(cfg, allow_inf=False):
    out = []
    for tok in cfg["ells"].split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok.upper() in ("INF", "BOX") and allow_inf:
            out.append(thermo.INF)
            continue
        try:
            ell = int(tok)
        except ValueError:
            raise ConfigError(f"ell {tok!r} is not an integer") from None
        if ell < 1:
            raise ConfigError("each ell must be >= 1")
        out.append(ell)
    if not out:
        raise ConfigError("ell list is empty")
    return out


def _kinds(cfg):
    try:
        kinds = [Kind.parse(k) for k in cfg["kinds"].split(",") if k.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not kinds:
        raise ConfigError("kinds list is empty")
    return sorted(set(kinds), key=lambda k: k.value)


def _bool(cfg, key):
    v = cfg[key].strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} = {cfg[key]!r} is not a boolean")


def _species(cfg):
    path = cfg["species"].strip()
    if path and not Path(path).is_file():
        raise ConfigError(f"species file {path} does not exist")
    return load_species(path or None)


class Context:
    """Resolved inputs shared by the figure commands."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.sp = _species(cfg)
        self.n_atoms = _float(cfg, "n_atoms")
        self.vc = _float(cfg, "vc_um3") * 1e-18
        self.power = _float(cfg, "power_W")
        self.detuning = 2 * pi * _float(cfg, "detuning_2pi_THz") * 1e12
        self.wavelength = _float(cfg, "wavelength_nm") * 1e-9
        self.aspect = _float(cfg, "aspect")

    def configuration(self, kind, ell):
        return build_configuration(kind, ell, self.sp, self.n_atoms, self.vc, self.aspect)


# --- output ------------------------------------------------------------------


def _fmt(x):
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.10g}"
    return str(x)


def _metadata_lines(command, cfg, wall, design, extra=None):
    meta = {
        "tool": f"lgbec {__version__}",
        "command": command,
        "kernel_backend": kernels.BACKEND,
        "config": cfg,
        "model_parameters": design,
    }
    if extra:
        meta.update(extra)
    lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in meta.items()]
    lines.append(f"# wall_time_s: {wall:.3f}")
    return lines


def write_csv(path, header_lines, columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r.get(c, "")) for c in columns])
    with open(path, "w") as fh:
        fh.write("\n".join(header_lines) + "\n")
        fh.write(buf.getvalue())


_local = threading.local()


def _show_warning(message, category, filename, lineno, file=None, line=None):
    sink = getattr(_local, "sink", None)
    if sink is None:
        print(f"{category.__name__}: {message}", file=sys.stderr)
    else:
        sink.append(str(message))


def _run_rows(tasks, fn, threads):
    """fn over tasks, in task order; a failing row is returned flagged.

    Warnings raised while computing a row land in its "warning" column
    (collected per thread, so attribution holds with --threads > 1).
    """

    def safe(task):
        _local.sink = []
        try:
            row = fn(task)
        except Exception as exc:  # row-level failure is reported, not raised
            row = {"flag": f"error: {type(exc).__name__}: {exc}"}
        if _local.sink:
            row.setdefault("warning", "; ".join(sorted(set(_local.sink))))
        _local.sink = None
        row.setdefault("flag", "ok")
        return row

    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = _show_warning
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(safe, tasks))
        return [safe(t) for t in tasks]


# --- commands ----------------------------------------------------------------


def cmd_tc_sweep(cfg, out, threads):
    ctx = Context(cfg)
    coeff_path = cfg["coefficients"].strip() or None
    coeffs = thermo.TcCorrectionCoefficients.load(coeff_path)
    include_d2 = _bool(cfg, "include_d2")
    tasks = [(k, ell) for k in _kinds(cfg) for ell in _ells(cfg)]

    def row(task):
        kind, ell = task
        trap = ctx.configuration(kind, ell).trap
        tc0 = thermo.tc_ideal(trap, ctx.n_atoms, ctx.sp.mass)
        q = thermo.interaction_parameter(trap, ctx.n_atoms, ctx.sp)
        r = {"configuration": kind.value, "ell": ell, "eta": trap.eta, "Tc0_nK": tc0 * 1e9, "q": q}
        try:
            r["Tc_nK"] = thermo.tc_interacting(trap, ctx.n_atoms, ctx.sp, coeffs, include_d2) * 1e9
        except thermo.PerturbativeRegimeError as exc:
            r["Tc_nK"] = math.nan
            r["flag"] = f"error: out of regime: {exc}"
        return r

    rows = _run_rows(tasks, row, threads)
    for (kind, ell), r in zip(tasks, rows):
        r.setdefault("configuration", kind.value)
        r.setdefault("ell", ell)
    design = {
        "Tc_form": "Tc0 (1 + D1 q + D1p q^(2 eta) + D2 q^2), q = a_s / lambda_T(Tc0)",
        "include_d2": include_d2,
        "q_max": thermo.Q_MAX,
        "aspect": ctx.aspect,
    }
    sidecar = {
        "coefficient_table": coeffs.source,
        "coefficient_rows": len(coeffs.eta),
        "eta_range": [coeffs.eta[0], coeffs.eta[-1]],
        "interpolation": "monotone cubic (PCHIP)",
    }
    return {
        "tc_sweep.csv": (["configuration", "ell", "eta", "Tc0_nK", "Tc_nK", "q", "flag"], rows),
    }, design, {"tc_sweep.json": sidecar}


def cmd_levels(cfg, out, threads):
    kt = _float(cfg, "kt_over_hbar_omega")
    n_levels = int(_float(cfg, "n_levels"))
    total = _float(cfg, "total_number")
    tasks = _ells(cfg, allow_inf=True)

    def spectrum(ell):
        spec = thermo.level_spectrum_1d(ell, n_levels)
        occ, mu = thermo.bose_occupations(spec.energies, kt, total)
        return {"ell": ell, "energies": spec.energies, "occ": occ, "mu": mu}

    results = _run_rows(tasks, spectrum, threads)
    rows = []
    for ell, res in zip(tasks, results):
        if not res["flag"].startswith("ok"):
            rows.append({"ell": ell, "n": "", "flag": res["flag"]})
            continue
        for n, (e, p) in enumerate(zip(res["energies"], res["occ"])):
            rows.append({
                "ell": ell, "n": n, "energy_hbar_omega": float(e), "population": float(p),
                "fraction": float(p / total), "flag": "ok",
            })
    design = {
        "kt_over_hbar_omega": kt,
        "n_levels": n_levels,
        "total_number": total,
        "size_rule": "ground-state classical turning points equal to the harmonic reference",
        "box_limit": "analytic, INF",
    }
    return {
        "levels.csv": (["ell", "n", "energy_hbar_omega", "population", "fraction", "flag"], rows),
    }, design, {}


def cmd_scattering(cfg, out, threads):
    ctx = Context(cfg)
    temperature = _float(cfg, "temperature_nK") * 1e-9
    detunings = sorted(2 * pi * d * 1e9 for d in _floats(cfg, "detunings_2pi_GHz"))
    kinds = _kinds(cfg)
    if kinds != [Kind.ThreeD_LG]:
        raise ConfigError("scattering supports kinds = 3D_LG only")
    tasks = [(ell, d) for ell in _ells(cfg) for d in detunings]

    def row(task):
        ell, det = task
        config = ctx.configuration(Kind.ThreeD_LG, ell)
        waist = required_waist(config, ctx.power, det, ctx.sp)[0]
        beam = optics.LGBeam(ell, ctx.power, waist.waist, det, ctx.wavelength)
        cloud = heating.ThermalCloud.at(config.trap, ctx.n_atoms, temperature, ctx.sp.mass)
        avg = heating.average_intensity_3dlg(cloud, beam, ctx.sp)
        eta = heating.scattering_rate(avg, ctx.sp, det)
        return {
            "configuration": "3D_LG", "ell": ell, "detuning_2pi_GHz": det / (2 * pi * 1e9),
            "w0_um": waist.waist * 1e6, "fugacity": cloud.fugacity, "avg_intensity_W_per_m2": avg,
            "eta_sc_per_s": eta, "heating_nK_per_s": heating.heating_rate(eta, ctx.sp) * 1e9,
        }

    rows = _run_rows(tasks, row, threads)
    for (ell, det), r in zip(tasks, rows):
        r.setdefault("ell", ell)
        r.setdefault("detuning_2pi_GHz", det / (2 * pi * 1e9))
    design = {
        "temperature_K": temperature,
        "density_model": "local-density Bose gas, circular-beam power-law intensity",
        "heating_rule": "dT/dt = (2/3) T_rec eta_sc",
        "hot_cloud_warning": f"k_B T > {heating.HOT_CLOUD_FRACTION} barrier",
        "aspect": ctx.aspect,
    }
    cols = ["configuration", "ell", "detuning_2pi_GHz", "w0_um", "fugacity", "avg_intensity_W_per_m2",
            "eta_sc_per_s", "heating_nK_per_s", "flag", "warning"]
    return {"scattering.csv": (cols, rows)}, design, {}


def cmd_waists(cfg, out, threads):
    ctx = Context(cfg)
    tasks = [(k, ell) for k in _kinds(cfg) for ell in _ells(cfg)]
    g = interaction_strength(ctx.sp)

    def rows_for(task):
        kind, ell = task
        config = ctx.configuration(kind, ell)
        rho_tf, z_tf = half_widths(config.trap, mu_thomas_fermi(config.trap, ctx.n_atoms, g))
        waists = required_waist(config, ctx.power, ctx.detuning, ctx.sp)
        primary_role = primary_beam(config, waists).role
        out_rows = []
        for w in waists:
            beam = optics.LGBeam(w.ell, ctx.power, w.waist, ctx.detuning, ctx.wavelength)
            z_r = optics.rayleigh_range(beam)
            # the circular beam runs along z, the light sheet across it
            length = 2 * (z_tf if w.role == "circular" else rho_tf)
            ok = length <= RAYLEIGH_FRACTION * z_r
            out_rows.append({
                "configuration": kind.value, "ell": ell, "beam": w.role, "beam_ell": w.ell,
                "w0_um": w.waist * 1e6, "rho0_um": w.ring_radius * 1e6,
                "primary": w.role == primary_role,
                "approximate": w.approximate, "rayleigh_mm": z_r * 1e3,
                "trap_length_um": length * 1e6, "rayleigh_ok": ok,
                "flag": "ok",
                "warning": "" if ok else f"trap length exceeds {RAYLEIGH_FRACTION} x Rayleigh range",
            })
        return {"rows": out_rows}

    results = _run_rows(tasks, rows_for, threads)
    rows = []
    for (kind, ell), res in zip(tasks, results):
        if "rows" in res:
            rows.extend(res["rows"])
        else:
            rows.append({"configuration": kind.value, "ell": ell, "flag": res["flag"]})
    for r in rows:
        if r.get("warning"):
            print(f"warning: {r['configuration']} ell={r['ell']} {r['beam']}: {r['warning']}", file=sys.stderr)
    design = {
        "power_W_each_beam": ctx.power,
        "detuning_rad_per_s": ctx.detuning,
        "sheet_model": "circular-beam power law applied to the light sheet (approximate)",
        "rayleigh_check": f"trap length <= {RAYLEIGH_FRACTION} z_R",
        "aspect": ctx.aspect,
    }
    cols = ["configuration", "ell", "beam", "beam_ell", "primary", "w0_um", "rho0_um", "approximate",
            "rayleigh_mm", "trap_length_um", "rayleigh_ok", "flag", "warning"]
    return {"waists.csv": (cols, rows)}, design, {}


def cmd_growth(cfg, out, threads):
    ctx = Context(cfg)
    f_eq = _float(cfg, "f_eq")
    threshold = _float(cfg, "threshold")
    t_end = _float(cfg, "t_end_s")
    rtol = _float(cfg, "rtol")
    tasks = [(k, ell) for k in _kinds(cfg) for ell in _ells(cfg)]

    def row(task):
        kind, ell = task
        trap = ctx.configuration(kind, ell).trap
        params = kinetics.GrowthParams.from_fraction(trap, ctx.sp, ctx.n_atoms, f_eq)
        series = kinetics.simulate_growth(params, t_end, rtol=rtol)
        t_c = kinetics.condensation_time(series, threshold)
        name = f"growth_{kind.value}_l{ell}.txt"
        return {
            "configuration": kind.value, "ell": ell, "eta": trap.eta,
            "Tc_nK": params.meta["Tc_K"] * 1e9, "T_nK": params.temperature * 1e9,
            "condensation_time_s": t_c, "series_file": name, "_series": series,
        }

    rows = _run_rows(tasks, row, threads)
    series_files = {}
    for (kind, ell), r in zip(tasks, rows):
        r.setdefault("configuration", kind.value)
        r.setdefault("ell", ell)
        s = r.pop("_series", None)
        if s is not None:
            series_files[r["series_file"]] = s
    design = {
        "f_eq": f_eq,
        "threshold": threshold,
        "closure": "T = Tc (1 - f_eq)^(1/(eta+1)), mu = mu_TF(f_eq N), Tc interacting",
        "integrator": f"DOP853, rtol {rtol:g}",
        "series_rtol": kinetics.SERIES_RTOL,
        "saturation_gap": kinetics.SATURATION_GAP,
        "aspect": ctx.aspect,
    }
    cols = ["configuration", "ell", "eta", "Tc_nK", "T_nK", "condensation_time_s", "series_file", "flag", "warning"]
    return {"growth_summary.csv": (cols, rows)}, design, {"_series": series_files}


def cmd_shapes(cfg, out, threads):
    ctx = Context(cfg)
    n_rho = int(_float(cfg, "n_rho"))
    n_z = int(_float(cfg, "n_z"))
    tol = _float(cfg, "tol")
    margin = _float(cfg, "grid_margin")
    fractions = _floats(cfg, "fractions")
    scheme = cfg["scheme"].strip()
    tasks = [(k, ell) for k in _kinds(cfg) for ell in _ells(cfg)]
    g = interaction_strength(ctx.sp)

    def row(task):
        kind, ell = task
        trap = ctx.configuration(kind, ell).trap
        grid = gpe.default_grid(trap, ctx.n_atoms, ctx.sp, n_rho, n_z, margin)
        res = gpe.solve_ground_state(trap, ctx.n_atoms, ctx.sp, grid, tol=tol, scheme=scheme)
        levels = gpe.iso_density_levels(res, fractions)
        stem = f"shapes_{kind.value}_l{ell}"
        mid = 0.5 if 0.5 in levels else fractions[0]
        return {
            "configuration": kind.value, "ell": ell,
            "mu_c_nK": res.mu_c / KB * 1e9,
            "mu_TF_nK": mu_thomas_fermi(trap, ctx.n_atoms, g) / KB * 1e9,
            "energy_nK": res.energy / KB * 1e9, "iterations": res.iterations, "residual": res.residual,
            "flatness": gpe.flatness_metric(res), "aspect_z_over_rho": gpe.contour_aspect(levels[mid]),
            "aspect_fraction": mid,
            "condensate_volume_um3": condensate_volume(trap, ctx.n_atoms, g) * 1e18,
            "density_file": stem + "_density.txt", "_res": res, "_levels": levels,
        }

    rows = _run_rows(tasks, row, threads)
    extra = {"_shapes": []}
    contour_rows = []
    for (kind, ell), r in zip(tasks, rows):
        r.setdefault("configuration", kind.value)
        r.setdefault("ell", ell)
        res, levels = r.pop("_res", None), r.pop("_levels", None)
        if res is None:
            continue
        extra["_shapes"].append((r["density_file"], res))
        for f in sorted(levels):
            for k, seg in enumerate(levels[f]):
                for rho, z in seg:
                    contour_rows.append({
                        "configuration": kind.value, "ell": ell, "fraction": f, "segment": k,
                        "rho_um": rho * 1e6, "z_um": z * 1e6,
                    })
    design = {
        "grid": [n_rho, n_z],
        "grid_margin_over_TF": margin,
        "tol": tol,
        "scheme": scheme,
        "discretization": "cell-centred, fourth-order symmetric kinetic form, Neumann axis",
        "fractions": fractions,
        "flatness": "std/mean of |psi|^2 over grid cells with V <= mu_c/2",
        "aspect": ctx.aspect,
    }
    cols = ["configuration", "ell", "mu_c_nK", "mu_TF_nK", "energy_nK", "iterations", "residual", "flatness",
            "aspect_z_over_rho", "aspect_fraction", "condensate_volume_um3", "density_file", "flag", "warning"]
    contour_cols = ["configuration", "ell", "fraction", "segment", "rho_um", "z_um"]
    return {
        "shapes_summary.csv": (cols, rows),
        "shapes_contours.csv": (contour_cols, contour_rows),
    }, design, extra


def cmd_species_check(cfg, out, threads):
    sp = _species(cfg)
    row = {
        "name": sp.name, "mass_kg": sp.mass, "gamma_s_rad_per_s": sp.gamma_s,
        "gamma_s_over_2pi_MHz": sp.gamma_s / (2 * pi * 1e6), "i_sat_W_per_m2": sp.i_sat,
        "a_s_nm": sp.a_s * 1e9, "lambda0_nm": sp.lambda0 * 1e9,
        "g_J_m3": interaction_strength(sp), "flag": "ok",
    }
    return {"species.csv": (list(row), [row])}, {"source": cfg["species"] or "shipped Rb87"}, {}


COMMANDS = {
    "tc-sweep": (cmd_tc_sweep, "critical temperature vs ell (ideal and interacting)"),
    "levels": (cmd_levels, "Bose occupations of the lowest 1D levels"),
    "scattering": (cmd_scattering, "photon scattering and heating rates vs ell and detuning"),
    "waists": (cmd_waists, "beam waists and ring radii vs ell"),
    "growth": (cmd_growth, "condensate growth curves and formation times"),
    "shapes": (cmd_shapes, "GPE ground-state densities and iso-density contours"),
    "species-check": (cmd_species_check, "validate and print a species file"),
}


def build_parser():
    p = argparse.ArgumentParser(prog="lgbec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"lgbec {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI-style config with [common] and per-command sections")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (recorded; the commands are deterministic)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for independent rows")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    common.add_argument("--ells", help="comma-separated ell list")
    common.add_argument("--kinds", help="comma-separated configurations (1D_LG, 2D_LG, 3D_LG)")
    common.add_argument("--species", help="species file")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return p


def _overrides(args):
    out = list(args.set)
    for key in ("ells", "kinds", "species"):
        v = getattr(args, key)
        if v is not None:
            out.append(f"{key}={v}")
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads < 1 or args.seed < 0:
        print("error: --threads must be >= 1 and --seed >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = resolve_config(args.command, args.config, _overrides(args))
        fn = COMMANDS[args.command][0]
        t0 = time.perf_counter()
        tables, design, extra = fn(cfg, args.out, args.threads)
        wall = time.perf_counter() - t0
    except (ConfigError, SpeciesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    resolved = dict(sorted(cfg.items()))
    header = _metadata_lines(args.command, resolved, wall, design, {"seed": args.seed, "threads": args.threads})
    failed = 0
    for name, (cols, rows) in tables.items():
        write_csv(out / name, header, cols, rows)
        failed += sum(1 for r in rows if str(r.get("flag", "ok")).startswith("error"))
    for name, obj in extra.items():
        if name == "_series":
            for fname, series in obj.items():
                kinetics.write_series(series, out / fname, [h[2:] for h in header])
        elif name == "_shapes":
            for fname, res in obj:
                gpe.write_density(res, out / fname, out / fname.replace(".txt", ".json"),
                                  {"config": resolved, "model_parameters": design})
        else:
            with open(out / name, "w") as fh:
                json.dump({"config": resolved, **obj}, fh, indent=2, sort_keys=True)
                fh.write("\n")
    print(json.dumps({"command": args.command, "config": resolved, "out": str(out)}, sort_keys=True))
    for name, (cols, rows) in tables.items():
        print(f"{out / name}: {len(rows)} rows")
    if failed:
        print(f"{failed} row(s) flagged with errors", file=sys.stderr)
        return EXIT_ROW_ERRORS
    return EXIT_OK
