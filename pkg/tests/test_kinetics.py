import dataclasses
import math
import warnings

import numpy as np
import pytest
from scipy.constants import Boltzmann as KB

from lgbec import _pykernels, kernels
from lgbec import kinetics as kin
from lgbec.trap import Kind, mu_thomas_fermi

from conftest import N_ATOMS

F_EQ = 0.1


@pytest.fixture(scope="module")
def growth(rb87, working_point):
    cache = {}

    def get(kind, ell, rtol=1e-8):
        key = (kind, ell, rtol)
        if key not in cache:
            p = kin.GrowthParams.from_fraction(working_point(kind, ell).trap, rb87, N_ATOMS, F_EQ)
            cache[key] = kin.simulate_growth(p, 20.0, rtol=rtol)
        return cache[key]

    return get


def series_reference(params, n_c, n_terms=20_000):
    """Plain double loop over the p and q sums, independent of the kernels."""
    kt = KB * params.temperature
    g = params.g
    phi = math.exp((params.mu_bath - 2 * mu_thomas_fermi(params.trap, params.n_eq, g)) / kt)
    mu_c = mu_thomas_fermi(params.trap, n_c, g) if n_c > 0 else 0.0
    x = math.exp((mu_c - params.mu_bath) / kt)
    lg = math.log(1 - phi)
    terms = [lg * lg]
    inner = 0.0
    for p in range(1, n_terms + 1):
        inner += phi**p / p
        terms.append((lg + inner) ** 2 * x**p)
    return kin.growth_coefficient(params.temperature, params.species) * math.fsum(terms)


def test_growth_coefficient_arithmetic(rb87):
    hbar = 1.054571817e-34  # CODATA 2018, 10 significant digits
    expected = 4 * rb87.mass * (rb87.a_s * 1.380649e-23 * 400e-9) ** 2 / (math.pi * hbar**3)
    assert kin.growth_coefficient(400e-9, rb87) == pytest.approx(expected, rel=1e-8)
    assert kin.growth_coefficient(400e-9, rb87) == pytest.approx(131.0932, rel=1e-6)


def test_growth_coefficient_quadratic(rb87):
    c = kin.growth_coefficient(300e-9, rb87)
    assert kin.growth_coefficient(600e-9, rb87) / c == pytest.approx(4, rel=1e-14)
    sp2 = dataclasses.replace(rb87, a_s=3 * rb87.a_s)
    assert kin.growth_coefficient(300e-9, sp2) / c == pytest.approx(9, rel=1e-14)


@pytest.mark.parametrize("kind,ell", [(Kind.ThreeD_LG, 1), (Kind.ThreeD_LG, 6), (Kind.OneD_LG, 6), (Kind.TwoD_LG, 3)])
def test_truncation_matches_brute_force(kind, ell, growth):
    p = growth(kind, ell).params
    for frac in (0.0, 0.1, 0.5, 0.9, 0.999):
        n = frac * p.n_eq
        adaptive = kin.growth_rate(p, n)
        assert adaptive == pytest.approx(kin.growth_rate_bruteforce(p, n, 10_000), rel=1e-10)
        assert adaptive == pytest.approx(series_reference(p, n), rel=1e-10)


def test_rate_positive_below_saturation(growth):
    p = growth(Kind.ThreeD_LG, 6).params
    for n in np.linspace(0, p.n_eq, 50, endpoint=False):
        assert kin.growth_rate(p, n) > 0


def test_empty_bath_limit():
    # phi = 0: log term and inner sums vanish
    assert kernels.growth_series(math.log1p(-0.0), 0.0, 0.5, 1e-12, 1000)[0] == 0.0
    small = kernels.growth_series(math.log1p(-1e-8), 1e-8, 0.5, 1e-12, 1000)[0]
    assert 0 < small < 1e-15


def test_saturation_is_flagged(growth):
    p = growth(Kind.ThreeD_LG, 1).params
    w, info = kin.growth_rate(p, 1.5 * p.n_eq, return_info=True)
    assert info["saturated"] and w > 0
    _, info = kin.growth_rate(p, 0.5 * p.n_eq, return_info=True)
    assert not info["saturated"]


def test_series_backends_agree(growth):
    p = growth(Kind.ThreeD_LG, 2).params
    log_term, phi, x, _ = kin._series_args(p, 0.3 * p.n_eq)
    a = _pykernels.growth_series(log_term, phi, x, 1e-12, 10**6)
    for impl in kernels.backends().values():
        b = impl.growth_series(log_term, phi, x, 1e-12, 10**6)
        assert b[1] == a[1]
        assert b[0] == pytest.approx(a[0], rel=1e-15)


def test_closure_metadata(growth):
    p = growth(Kind.ThreeD_LG, 1).params
    assert p.temperature == pytest.approx(p.meta["Tc_K"] * 0.9 ** (1 / 3), rel=1e-14)
    assert p.n_eq == pytest.approx(F_EQ * N_ATOMS)
    assert kin.bath_fugacity(p) == pytest.approx(math.exp(-p.mu_bath / p.kt), rel=1e-12)


def test_large_fraction_warns(rb87, working_point):
    with pytest.warns(UserWarning, match="non-depletable"):
        kin.GrowthParams.from_fraction(working_point(Kind.ThreeD_LG, 1).trap, rb87, N_ATOMS, 0.2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        kin.GrowthParams.from_fraction(working_point(Kind.ThreeD_LG, 1).trap, rb87, N_ATOMS, 0.1)


@pytest.mark.parametrize("kind,ell", [(Kind.ThreeD_LG, 1), (Kind.ThreeD_LG, 6), (Kind.TwoD_LG, 6), (Kind.OneD_LG, 6)])
def test_series_invariants(kind, ell, growth):
    s = growth(kind, ell)
    assert s.n_c[0] == 0.0
    assert np.all(np.diff(s.times) > 0)
    assert np.all(np.diff(s.n_c) >= 0)
    assert s.saturated
    assert abs(s.n_c[-1] / s.params.n_eq - 1) <= 1e-3 + 1e-9


def test_early_growth_is_spontaneous(growth):
    s = growth(Kind.ThreeD_LG, 1)
    p = s.params
    w0 = kin.growth_rate(p, 0.0)
    assert kin.growth_derivative(p, 0.0) == pytest.approx(2 * w0, rel=1e-15)
    # the stimulated term a N_c stays below 5% of the spontaneous one for N_c < 0.05 / a
    a = -math.expm1(-p.mu_bath / p.kt)
    for t in np.linspace(1e-6, 0.05 / a / (2 * w0), 8):
        n = s.dense(t)[0]
        assert n == pytest.approx(2 * w0 * t, rel=0.05)
        # linearised solution with constant W+ and a
        assert n == pytest.approx(math.expm1(2 * w0 * a * t) / a, rel=2e-3)


@pytest.mark.parametrize("kind,ell", [(Kind.ThreeD_LG, 1), (Kind.ThreeD_LG, 6), (Kind.OneD_LG, 6)])
def test_single_inflection_point(kind, ell, growth):
    s = growth(kind, ell)
    p = s.params
    t_end = s.times[np.flatnonzero(s.n_c >= 0.99 * p.n_eq)[0]]
    t = np.linspace(0, t_end, 2000)
    n = s.dense(t)[0]
    rate = np.array([kin.growth_derivative(p, x) for x in n])
    d = np.sign(np.diff(rate))
    assert np.count_nonzero(d[1:] != d[:-1]) == 1
    # finite-difference second derivative of the dense output agrees on the count
    n2 = np.diff(n, 2)
    big = np.abs(n2) > 1e-6 * np.max(np.abs(n2))
    sgn = np.sign(n2[big])
    assert np.count_nonzero(sgn[1:] != sgn[:-1]) == 1


def test_ell1_universality(growth):
    s = [growth(k, 1) for k in Kind]
    times = [kin.condensation_time(x) for x in s]
    assert max(times) / min(times) - 1 < 1e-6
    t = np.linspace(0, times[0], 200)
    ref = s[0].dense(t)[0]
    for other in s[1:]:
        assert np.max(np.abs(other.dense(t)[0] - ref)) < 1e-6 * s[0].params.n_eq


def test_ell6_ordering(growth):
    t3, t2, t1 = (kin.condensation_time(growth(k, 6)) for k in (Kind.ThreeD_LG, Kind.TwoD_LG, Kind.OneD_LG))
    assert t3 < t2 < t1


def test_faster_at_higher_ell(growth):
    assert kin.condensation_time(growth(Kind.ThreeD_LG, 1)) / kin.condensation_time(growth(Kind.ThreeD_LG, 6)) >= 5


@pytest.mark.parametrize("ell", [1, 6])
def test_tolerance_halving(ell, growth):
    a = kin.condensation_time(growth(Kind.ThreeD_LG, ell, 1e-8))
    b = kin.condensation_time(growth(Kind.ThreeD_LG, ell, 5e-9))
    assert abs(a / b - 1) < 1e-3


def test_threshold_parameter(growth):
    s = growth(Kind.ThreeD_LG, 6)
    t50, t90 = kin.condensation_time(s, 0.5), kin.condensation_time(s)
    assert t50 < t90
    assert s.dense(t90)[0] == pytest.approx(0.9 * s.params.n_eq, rel=1e-9)
    with pytest.raises(ValueError):
        kin.condensation_time(s, 1.0)


def test_unsaturated_series_raises(growth):
    p = growth(Kind.ThreeD_LG, 1).params
    s = kin.simulate_growth(p, 1e-3)
    assert not s.saturated
    with pytest.raises(kin.GrowthError):
        kin.condensation_time(s)


def test_invalid_params(rb87, working_point):
    trap = working_point(Kind.ThreeD_LG, 1).trap
    with pytest.raises(ValueError):
        kin.GrowthParams(-1.0, 1e-30, 10.0, trap, rb87)
    with pytest.raises(ValueError):
        kin.GrowthParams(1e-7, 1e-30, 0.5, trap, rb87)
    with pytest.raises(ValueError):
        kin.simulate_growth(kin.GrowthParams.from_fraction(trap, rb87, N_ATOMS), 0.0)


def test_write_series(tmp_path, growth):
    s = growth(Kind.ThreeD_LG, 6)
    path = tmp_path / "g.txt"
    kin.write_series(s, path, header=["kind = 3D_LG"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# kind = 3D_LG"
    assert any(line.startswith("# T_K = ") for line in lines)
    data = np.loadtxt(path)
    assert data.shape == (len(s.times), 2)
    assert np.allclose(data[:, 1], s.n_c / N_ATOMS, rtol=1e-9)
