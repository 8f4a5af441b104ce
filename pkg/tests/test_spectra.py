import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_spectra.kernel import reduced_to_dimensional
from casimir_spectra.lifshitz import Gap, te_evanescent_dimensionless
from casimir_spectra.materials import CONSTANTS
from casimir_spectra.spectra import (
    SpectrumSignError,
    _make_table,
    applicability_report,
    characteristic_frequency,
    contribution_range,
    cumulative_at,
    default_u_grid,
    default_v_grid,
    effective_spot_size,
    fraction_below_frequency,
    frequency_spectrum,
    minimal_width_range,
    quantile,
    transverse_wavevector_spectrum,
    wavelength_of,
    wavevector_spectrum,
)

from conftest import AU, AU_LOW_LOSS, AU_PLASMA, GAP_162, breakdown
from casimir_spectra.lifshitz import TE_EVANESCENT

C = CONSTANTS.c
_cache = {}


def v_table(material=AU, n=200):
    key = ("v", material, n)
    if key not in _cache:
        _cache[key] = wavevector_spectrum(GAP_162, material, default_v_grid(n))
    return _cache[key]


def u_table():
    if "u" not in _cache:
        _cache["u"] = frequency_spectrum(GAP_162, AU)
    return _cache["u"]


def uniform_table(n=4001):
    x = np.geomspace(1e-7, 1.0, n)
    return _make_table("v", x, np.ones_like(x), 1.0)


def test_uniform_density_quantiles():
    r = contribution_range(uniform_table(), 0.9)
    assert r.x_lo == pytest.approx(0.05, abs=1e-3)
    assert r.x_hi == pytest.approx(0.95, abs=1e-3)


@pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1, 1.5])
def test_fraction_outside_unit_interval(fraction):
    with pytest.raises(ValueError):
        contribution_range(uniform_table(), fraction)
    with pytest.raises(ValueError):
        minimal_width_range(uniform_table(), fraction)


def test_sign_change_is_an_error():
    x = np.geomspace(0.1, 10, 50)
    with pytest.raises(SpectrumSignError):
        _make_table("v", x, np.sin(x), 1.0)


def test_table_invariants():
    t = v_table()
    assert np.all(np.diff(t.x) > 0)
    assert np.all(np.diff(t.cumulative) >= 0)
    assert t.cumulative[0] == 0 and abs(t.cumulative[-1] - 1) < 1e-6
    assert t.trapezoid_total == pytest.approx(t.normalization, rel=1e-4)
    assert len(t.samples) == len(t.x)


def test_normalization_reproduces_pressure():
    t = v_table()
    te = breakdown("Au-paper", 162e-9).channels[TE_EVANESCENT].value
    assert t.normalization * t.metadata["pressure_prefactor_Pa"] == pytest.approx(te, rel=1e-5)


def test_v_density_shape():
    t = v_table()
    peak = t.density.max()
    assert 0.1 < t.x[np.argmax(t.density)] < 10
    assert t.density[0] < 1e-2 * peak
    assert t.density[-1] < 1e-6 * peak


def test_u_density_shape():
    t = u_table()
    assert t.density[-1] < 1e-12 * t.density.max()
    assert np.allclose(t.extra_columns["omega"], t.x * t.metadata["omega_per_u"])


def test_u_and_omega_tables_consistent():
    grid = default_u_grid(GAP_162, AU, 30)
    a = frequency_spectrum(GAP_162, AU, grid, refine=False)
    b = frequency_spectrum(GAP_162, AU, grid, variable="omega", refine=False)
    assert np.allclose(b.x, a.extra_columns["omega"], rtol=1e-15)
    assert np.allclose(b.cumulative, a.cumulative, atol=1e-12)
    with pytest.raises(ValueError):
        frequency_spectrum(GAP_162, AU, grid, variable="k")


def test_frequency_and_wavevector_normalizations_agree():
    assert u_table().normalization == pytest.approx(v_table().normalization, rel=1e-5)


@settings(max_examples=40, deadline=None)
@given(f1=st.floats(0.05, 0.95), df=st.floats(0.01, 0.5))
def test_quantile_nesting(f1, df):
    f2 = min(f1 + df, 0.99)
    t = v_table()
    a, b = contribution_range(t, f1), contribution_range(t, f2)
    assert b.x_lo <= a.x_lo and a.x_hi <= b.x_hi
    ca = cumulative_at(t, a.x_hi) - cumulative_at(t, a.x_lo)
    assert ca == pytest.approx(f1, abs=1e-3)


def test_minimal_width_is_narrowest():
    t = v_table()
    mw, eq = minimal_width_range(t, 0.9), contribution_range(t, 0.9)
    assert mw.x_hi - mw.x_lo <= eq.x_hi - eq.x_lo
    assert cumulative_at(t, mw.x_hi) - cumulative_at(t, mw.x_lo) == pytest.approx(0.9, abs=1e-3)


def test_quantile_inverts_cumulative():
    t = v_table()
    p = np.linspace(0.01, 0.99, 25)
    assert np.allclose(cumulative_at(t, quantile(t, p)), p, atol=1e-3)


@pytest.mark.parametrize("material", [AU, AU_LOW_LOSS], ids=["Au-paper", "Au-low-loss"])
def test_grid_refinement_stability(material):
    coarse = contribution_range(v_table(material, 100), 0.9)
    fine = contribution_range(v_table(material, 200), 0.9)
    assert fine.x_lo == pytest.approx(coarse.x_lo, rel=0.01)
    assert fine.x_hi == pytest.approx(coarse.x_hi, rel=0.01)


def test_unrefined_grids_converge_too():
    a = wavevector_spectrum(GAP_162, AU, default_v_grid(400), refine=False)
    b = wavevector_spectrum(GAP_162, AU, default_v_grid(800), refine=False)
    ra, rb = contribution_range(a, 0.9), contribution_range(b, 0.9)
    assert rb.x_lo == pytest.approx(ra.x_lo, rel=0.01)
    assert rb.x_hi == pytest.approx(ra.x_hi, rel=0.01)


def test_v_range_insensitive_to_relaxation():
    # endpoints compared relative to the Au-paper values
    a = contribution_range(v_table(AU), 0.9)
    b = contribution_range(v_table(AU_LOW_LOSS), 0.9)
    assert abs(b.x_lo - a.x_lo) < 0.1 * a.x_lo
    assert abs(b.x_hi - a.x_hi) < 0.1 * a.x_hi


def test_wavelength_bound_inside_range():
    r = contribution_range(v_table(), 0.9)
    l = GAP_162.separation
    v = np.geomspace(r.x_lo, r.x_hi, 50)
    u = np.geomspace(1e-4, 1e3, 50)
    uu, vv = np.meshgrid(u, v)
    _, kp = reduced_to_dimensional(uu, vv, AU, l)
    q = vv / l
    assert np.all(kp >= q)
    lam = 2 * np.pi / kp
    assert np.all(lam <= 2 * np.pi * l / vv * (1 + 1e-9))
    assert np.all(lam[vv >= 1] <= 2 * np.pi * l * (1 + 1e-9))


def test_wavelength_of():
    assert wavelength_of(2 * math.pi) == pytest.approx(1.0)
    assert wavelength_of(1 / 162e-9) == pytest.approx(1.018e-6, rel=1e-3)
    with pytest.raises(ValueError):
        wavelength_of(0.0)


def test_spot_size():
    s = effective_spot_size(150e-6, 162e-9)
    assert s.exact == pytest.approx(13.9e-6, rel=5e-3)
    assert s.approx == pytest.approx(s.exact, rel=0.01)
    assert effective_spot_size(150e-6, 750e-9).exact == pytest.approx(30.0e-6, rel=5e-3)
    assert effective_spot_size(150e-6, 1e-15).exact < 1e-8
    with pytest.raises(ValueError):
        effective_spot_size(150e-6, 150e-6)


def test_characteristic_frequency():
    assert characteristic_frequency(100e-9) == pytest.approx(1.5e15, rel=1e-3)
    assert characteristic_frequency(162e-9) == pytest.approx(9.26e14, rel=1e-3)
    assert characteristic_frequency(1e3) < 1e6


def test_applicability_report_fields():
    r = applicability_report(GAP_162, AU, 150e-6)
    assert r.lambda_max == 2 * math.pi * 162e-9
    assert r.criterion_comment and not r.criterion_ref2
    assert r.threshold_separation == pytest.approx(30.4e-6, rel=1e-3)
    assert r.ref2_wavelength_estimate == pytest.approx(35.4e-6, rel=1e-3)
    assert set(r.as_dict()) >= {"l", "R", "lambda_max", "spot_size", "criterion_comment"}
    assert math.isinf(applicability_report(GAP_162, AU_PLASMA, 150e-6).ref2_wavelength_estimate)


def test_transverse_spectrum_matches_channel():
    grid = np.geomspace(1e-3, 20.0, 60) / GAP_162.separation
    t = transverse_wavevector_spectrum(GAP_162, AU, grid)
    te = breakdown("Au-paper", 162e-9).channels[TE_EVANESCENT].value
    assert t.normalization == pytest.approx(te, rel=1e-5)
    assert np.allclose(t.extra_columns["wavelength"], 2 * np.pi / t.x)


def test_fraction_below_frequency_limits():
    assert fraction_below_frequency(GAP_162, AU, 1e4) < 1e-3
    assert fraction_below_frequency(GAP_162, AU, 1e17) == pytest.approx(1.0, abs=1e-6)


def test_peak_frequency_near_damping_scale():
    t = u_table()
    u_scale = 0.25  # nu (omega_c / omega_p)^2 in units of u
    u_peak = t.x[np.argmax(t.density)]
    assert u_scale / 10 < u_peak < 10 * u_scale


def test_median_frequency_within_factor_ten():
    t = u_table()
    wc = characteristic_frequency(GAP_162.separation)
    scale = AU.damping * (wc / AU.plasma_frequency) ** 2
    median_omega = float(quantile(t, 0.5)) * t.metadata["omega_per_u"]
    assert median_omega < 10 * scale


def test_spectra_need_lossy_drude():
    with pytest.raises(ValueError):
        wavevector_spectrum(GAP_162, AU_PLASMA)
    with pytest.raises(ValueError):
        frequency_spectrum(GAP_162, AU_PLASMA)


def test_dimensionless_pressure_consistent_with_table():
    t = v_table(AU_LOW_LOSS)
    p = te_evanescent_dimensionless(GAP_162, AU_LOW_LOSS).value
    assert t.normalization * t.metadata["pressure_prefactor_Pa"] == pytest.approx(p, rel=1e-5)


def test_gap_type():
    assert Gap(1e-7).temperature == 300.0
