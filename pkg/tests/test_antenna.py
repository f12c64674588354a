# tests/test_antenna.py

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from antenna import (
    CodeWord,
    CodeWordError,
    ElementModel,
    ElementModelError,
    GeometryError,
    GuideGeometry,
    Lobe,
    PatternCut,
    PatternError,
    array_pattern,
    azimuth_grid,
    beam_summary,
    code_fields,
    effective_weight,
    polarizability,
    reference_wave,
)

FREQUENCY = 62e9


def anchored():
    return GuideGeometry.anchored(16, 1.407e-3, FREQUENCY)


# ==============================
# Element model
# ==============================

def test_polarizability_peaks_at_resonance():
    model = ElementModel()
    omega = 2 * np.pi * np.linspace(55e9, 66e9, 22001)
    power = np.abs(polarizability(model, omega)) ** 2
    omega_max = omega[np.argmax(power)]
    assert abs(omega_max - model.omega0) / model.omega0 < 1e-3
    assert abs(polarizability(model, model.omega0)) ** 2 >= (1 - 1e-3) * power.max()


def test_polarizability_is_imaginary_at_resonance():
    model = ElementModel()
    alpha = polarizability(model, model.omega0)
    assert isinstance(alpha, complex)
    assert abs(alpha.real) < 1e-9 * abs(alpha)
    assert alpha.imag == pytest.approx(-model.coupling_F * model.omega0 / model.damping_gamma)


def test_polarizability_rejects_non_positive_frequency():
    with pytest.raises(ElementModelError):
        polarizability(ElementModel(), 0.0)


def test_off_state_leaks_rho_squared_power():
    model = ElementModel(off_leakage_rho=1 / 3)
    on = effective_weight(model, 1, FREQUENCY)
    off = effective_weight(model, 0, FREQUENCY)
    assert abs(on) ** 2 / abs(off) ** 2 == pytest.approx(9.0)
    with pytest.raises(ElementModelError):
        effective_weight(model, 2, FREQUENCY)


@pytest.mark.parametrize("kwargs", [
    {"f0": 0.0},
    {"coupling_F": -1.0},
    {"damping_gamma": 0.0},
    {"off_leakage_rho": 1.0},
    {"off_state_phase_rad": math.nan},
])
def test_element_model_validation(kwargs):
    with pytest.raises(ElementModelError):
        ElementModel(**kwargs)


# ==============================
# Geometry and codes
# ==============================

def test_anchored_geometry_has_full_wave_phase_step():
    geom = anchored()
    assert geom.phase_step(FREQUENCY) == pytest.approx(2 * math.pi, rel=1e-12)
    assert geom.eps_eff == pytest.approx(11.81, abs=0.01)


def test_reference_wave():
    geom = GuideGeometry(feed_h0=2.0 + 0.0j)
    assert reference_wave(geom, 0, FREQUENCY) == 2.0
    expected = 2.0 * np.exp(-1j * geom.beta(FREQUENCY) * 5 * geom.spacing_d)
    assert reference_wave(geom, 5, FREQUENCY) == pytest.approx(expected)
    for index in (-1, 16):
        with pytest.raises(IndexError):
            reference_wave(geom, index, FREQUENCY)


@pytest.mark.parametrize("kwargs", [
    {"n_elements": 0},
    {"spacing_d": 0.0},
    {"eps_eff": 0.5},
    {"feed_h0": 0j},
])
def test_geometry_validation(kwargs):
    with pytest.raises(GeometryError):
        GuideGeometry(**kwargs)


def test_codeword_conversions():
    code = CodeWord.from_string("1001001001001001")
    assert code.to_int() == 0x9249
    assert code.to_hex() == "0x9249"
    assert CodeWord.from_int(0x9249) == code
    assert code.complement().to_int() == 0x6DB6
    assert str(CodeWord.from_string("10000").rotate(1)) == "01000"
    assert str(CodeWord.from_string("10001").rotate(-1)) == "00011"


def test_codeword_validation():
    with pytest.raises(CodeWordError):
        CodeWord.from_int(1 << 16, 16)
    with pytest.raises(CodeWordError):
        CodeWord.from_string("10a1")
    with pytest.raises(CodeWordError):
        CodeWord(())


# ==============================
# Pattern
# ==============================

def test_null_pattern(plain_model, geometry):
    cut = array_pattern(geometry, plain_model, CodeWord.all_zeros(), FREQUENCY, azimuth_grid(1.0))
    assert not cut.normalizable
    assert np.all(cut.complex_field == 0)
    assert np.all(np.isneginf(cut.directivity_dbi))
    assert cut.gain_at(0.0) == -math.inf
    assert beam_summary(cut).n_beams == 0


def test_all_shorted_row_still_leaks(geometry):
    cut = array_pattern(geometry, ElementModel(), CodeWord.all_zeros(), FREQUENCY, azimuth_grid(1.0))
    assert cut.radiated_power > 0


def test_raw_field_is_linear_in_disjoint_codes(plain_model, geometry):
    grid = azimuth_grid(0.5)
    a = CodeWord.from_int(0x9000)
    b = CodeWord.from_int(0x0249)
    both = CodeWord.from_int(0x9249)
    fields = [array_pattern(geometry, plain_model, c, FREQUENCY, grid).raw_field for c in (a, b, both)]
    np.testing.assert_allclose(fields[0] + fields[1], fields[2], rtol=1e-12, atol=1e-9)


def test_rotation_keeps_magnitude_when_wrapped_bit_is_off(plain_model):
    geom = anchored()
    grid = azimuth_grid(0.5)
    code = CodeWord.from_string("1001001001001000")
    rotated = code.rotate(1)
    original = array_pattern(geom, plain_model, code, FREQUENCY, grid).raw_field
    shifted = array_pattern(geom, plain_model, rotated, FREQUENCY, grid).raw_field
    np.testing.assert_allclose(np.abs(shifted), np.abs(original), rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("shift", [1, 3, 7, 15])
def test_rotation_keeps_broadside_value(plain_model, shift):
    geom = anchored()
    code = CodeWord.from_int(0x9249)
    grid = np.array([0.0])
    base = array_pattern(geom, plain_model, code, FREQUENCY, grid).raw_field
    turned = array_pattern(geom, plain_model, code.rotate(shift), FREQUENCY, grid).raw_field
    np.testing.assert_allclose(turned, base, rtol=1e-9)


def test_complement_differs_but_alternating_codes_match(plain_model):
    geom = anchored()
    grid = azimuth_grid(0.5)
    code1 = CodeWord.from_int(0x9249)
    c1 = array_pattern(geom, plain_model, code1, FREQUENCY, grid).raw_field
    c1_bar = array_pattern(geom, plain_model, code1.complement(), FREQUENCY, grid).raw_field
    assert not np.allclose(np.abs(c1), np.abs(c1_bar))

    # 0xAAAA and 0x5555 are one element apart, so their patterns coincide in magnitude
    alt = CodeWord.from_int(0xAAAA)
    a = array_pattern(geom, plain_model, alt, FREQUENCY, grid)
    b = array_pattern(geom, plain_model, alt.complement(), FREQUENCY, grid)
    np.testing.assert_allclose(np.abs(a.raw_field), np.abs(b.raw_field), rtol=1e-9, atol=1e-9)
    visible = a.directivity_dbi > -40
    np.testing.assert_allclose(a.directivity_dbi[visible], b.directivity_dbi[visible], atol=1e-6)


def test_more_radiating_elements_never_radiate_less(plain_model):
    geom = anchored()
    grid = azimuth_grid(1.0)
    rng = np.random.default_rng(7)
    for _ in range(40):
        subset = int(rng.integers(1, 1 << 16))
        superset = subset | int(rng.integers(0, 1 << 16))
        small = array_pattern(geom, plain_model, CodeWord.from_int(subset), FREQUENCY, grid)
        large = array_pattern(geom, plain_model, CodeWord.from_int(superset), FREQUENCY, grid)
        assert large.radiated_power >= small.radiated_power * (1 - 1e-12)


def test_directivity_integrates_to_four_pi(geometry, model):
    grid = azimuth_grid(0.05)
    cut = array_pattern(geometry, model, CodeWord.from_int(0x9249), FREQUENCY, grid)
    linear = np.abs(cut.complex_field) ** 2
    np.testing.assert_allclose(10 * np.log10(linear), cut.directivity_dbi, atol=1e-9)
    total = 4.0 / 3.0 * trapezoid(linear, np.radians(grid))
    assert total == pytest.approx(4 * math.pi, rel=5e-3)


def test_batch_fields_match_single_patterns(geometry, model):
    grid = azimuth_grid(1.0)
    values = [0x9249, 0x1111, 0xAAAA, 0x0000]
    bits = np.array([CodeWord.from_int(v).bits for v in values])
    batch = code_fields(geometry, model, bits, FREQUENCY, grid)
    for row, value in zip(batch, values):
        single = array_pattern(geometry, model, CodeWord.from_int(value), FREQUENCY, grid).complex_field
        np.testing.assert_allclose(row, single, rtol=1e-9, atol=1e-12)


def test_pattern_rejects_bad_inputs(geometry, model):
    code = CodeWord.from_int(0x9249)
    with pytest.raises(PatternError):
        array_pattern(geometry, model, code, FREQUENCY, [10.0, 5.0])
    with pytest.raises(PatternError):
        array_pattern(geometry, model, code, FREQUENCY, [0.0, 95.0])
    with pytest.raises(PatternError):
        array_pattern(geometry, model, CodeWord.from_int(3, 8), FREQUENCY, azimuth_grid(1.0))
    cut = array_pattern(geometry, model, code, FREQUENCY, azimuth_grid(1.0, -30.0, 30.0))
    with pytest.raises(PatternError):
        cut.gain_at(45.0)


# ==============================
# Beam summary
# ==============================

def synthetic_cut():
    grid = azimuth_grid(0.25)
    gain = (10 * np.exp(-((grid - 30) / 5) ** 2) + 10 * np.exp(-((grid + 30) / 5) ** 2)
            + 0.5 * np.exp(-(grid / 5) ** 2))
    field = np.sqrt(gain).astype(complex)
    with np.errstate(divide='ignore'):
        dbi = 10 * np.log10(gain)
    return PatternCut(frequency=FREQUENCY, azimuth_grid=grid, complex_field=field, directivity_dbi=dbi,
                      code=CodeWord.all_ones(), raw_field=field, radiated_power=1.0)


def test_beam_summary_of_two_lobes_and_a_sidelobe():
    summary = beam_summary(synthetic_cut())
    assert summary.n_beams == 2
    assert summary.lobe_directions == pytest.approx((-30.0, 30.0), abs=0.01)
    assert abs(summary.mld_deg) == pytest.approx(30.0, abs=0.01)
    assert summary.peak_dbi == pytest.approx(10.0, abs=1e-6)
    assert summary.sll_db == pytest.approx(10 * math.log10(0.05), abs=1e-3)
    # Gaussian half-power width 2 * 5 * sqrt(ln 2)
    assert summary.hpbw_deg == pytest.approx(10 * math.sqrt(math.log(2)), abs=0.05)
    assert all(isinstance(lobe, Lobe) for lobe in summary.lobes)


def test_lower_threshold_counts_the_sidelobe_as_a_beam():
    summary = beam_summary(synthetic_cut(), detect_threshold_db=-15.0)
    assert summary.n_beams == 3
    assert summary.sll_db is None


def test_threshold_must_be_negative():
    with pytest.raises(PatternError):
        beam_summary(synthetic_cut(), detect_threshold_db=0.0)


def test_code_one_has_two_lobes_either_side_of_broadside(geometry, model):
    cut = array_pattern(geometry, model, CodeWord.from_int(0x9249), FREQUENCY, azimuth_grid(0.25))
    summary = beam_summary(cut)
    assert summary.n_beams == 2
    left, right = summary.lobe_directions
    assert left == pytest.approx(-49.0, abs=3.0)
    assert right == pytest.approx(23.0, abs=3.0)


def test_all_ones_points_at_broadside(plain_model):
    cut = array_pattern(anchored(), plain_model, CodeWord.all_ones(), FREQUENCY, azimuth_grid(0.25))
    summary = beam_summary(cut)
    assert summary.n_beams == 1
    assert abs(summary.mld_deg) <= 2.0
