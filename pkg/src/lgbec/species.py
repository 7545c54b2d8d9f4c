"""Atomic species constants and the species config format.

Everything is SI internally.  Species files are flat ``key = value`` text
where each key is a field name followed by an explicit unit suffix, e.g.
``mass_kg`` or ``a_s_nm``; see ``data/rb87.species``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from scipy.constants import atomic_mass, hbar, physical_constants, pi

A0 = physical_constants["Bohr radius"][0]

FIELDS = ("mass", "gamma_s", "i_sat", "a_s", "lambda0")

# field -> {unit suffix: factor to SI}
UNITS = {
    "mass": {"kg": 1.0, "u": atomic_mass},
    "gamma_s": {"rad_per_s": 1.0, "over_2pi_Hz": 2 * pi, "over_2pi_MHz": 2 * pi * 1e6},
    "i_sat": {"W_per_m2": 1.0, "mW_per_cm2": 10.0},
    "a_s": {"m": 1.0, "nm": 1e-9, "a0": A0},
    "lambda0": {"m": 1.0, "nm": 1e-9},
}


class SpeciesError(ValueError):
    pass


@dataclass(frozen=True)
class AtomSpecies:
    """Two-level atom.

    Attributes:
        mass: kg
        gamma_s: spontaneous emission rate, rad/s
        i_sat: saturation intensity, W/m^2
        a_s: s-wave scattering length, m (0 gives the ideal gas)
        lambda0: transition wavelength, m
    """

    mass: float
    gamma_s: float
    i_sat: float
    a_s: float
    lambda0: float
    name: str = ""

    def __post_init__(self):
        for f in ("mass", "gamma_s", "i_sat", "lambda0"):
            v = getattr(self, f)
            if not (math.isfinite(v) and v > 0):
                raise SpeciesError(f"{f}: non-positive value {v!r}")
        if not (math.isfinite(self.a_s) and self.a_s >= 0):
            raise SpeciesError(f"a_s: non-positive value {self.a_s!r}")
        if self.a_s >= 100e-9:
            raise SpeciesError(f"a_s = {self.a_s:g} m is outside the dilute-gas regime")

    @property
    def wavenumber(self):
        return 2 * pi / self.lambda0


def parse_species(text: str) -> AtomSpecies:
    """Build an AtomSpecies from the text of a species document."""
    values = {}
    name = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpeciesError(f"line {lineno}: expected 'key = value'")
        key, val = (p.strip() for p in line.split("=", 1))
        if key == "name":
            name = val
            continue
        for field in FIELDS:
            if key.startswith(field + "_"):
                unit = key[len(field) + 1:]
                break
        else:
            raise SpeciesError(f"line {lineno}: unknown key {key!r}")
        if unit not in UNITS[field]:
            raise SpeciesError(
                f"line {lineno}: unknown unit suffix {unit!r} for {field} "
                f"(allowed: {', '.join(UNITS[field])})"
            )
        if field in values:
            raise SpeciesError(f"line {lineno}: duplicate field {field}")
        try:
            x = float(val)
        except ValueError:
            raise SpeciesError(f"line {lineno}: {val!r} is not a number") from None
        if not (x > 0 or (field == "a_s" and x == 0)):
            raise SpeciesError(f"{field}: non-positive value {x!r}")
        values[field] = x * UNITS[field][unit]
    missing = [f for f in FIELDS if f not in values]
    if missing:
        raise SpeciesError(f"missing field: {', '.join(missing)}")
    return AtomSpecies(name=name, **values)


def load_species(source=None) -> AtomSpecies:
    """Load a species document from a path; None gives the shipped Rb-87."""
    if source is None:
        text = resources.files("lgbec").joinpath("data/rb87.species").read_text()
    else:
        text = Path(source).read_text()
    return parse_species(text)


def rubidium87() -> AtomSpecies:
    return load_species()


def interaction_strength(sp: AtomSpecies) -> float:
    """Contact coupling g = 4 pi hbar^2 a_s / m, in J m^3."""
    return 4 * pi * hbar**2 * sp.a_s / sp.mass
