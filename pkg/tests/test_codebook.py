# tests/test_codebook.py

import random

import numpy as np
import pytest

from antenna import (
    REFERENCE_BEAMS,
    BeamSummary,
    CodeWord,
    GuideGeometry,
    Lobe,
    array_pattern,
    azimuth_grid,
    beam_summary,
    code_fields,
)
from codebook import (
    BeamSpec,
    CodebookError,
    check_reference,
    directional_hop_set,
    enumerate_metrics,
    evaluate_code,
    rank_key,
    synthesize,
    verify_reference_codes,
)

FREQUENCY = 62e9
CODE_ONE_SPEC = BeamSpec(targets=((-49.0, 5.0), (23.0, 5.0)), required_beams=2)


@pytest.fixture
def small_geometry():
    return GuideGeometry.anchored(8, 1.407e-3, FREQUENCY)


def summary_with(directions, sll_db=None, peak_dbi=10.0):
    lobes = tuple(Lobe(direction_deg=d, peak_dbi=peak_dbi, hpbw_deg=5.0) for d in directions)
    return BeamSummary(n_beams=len(lobes), mld_deg=directions[0], peak_dbi=peak_dbi,
                       sll_db=sll_db, lobes=lobes)


# ==============================
# Beam spec
# ==============================

def test_match_error_sums_pointing_errors():
    assert CODE_ONE_SPEC.match_error(summary_with((-48.0, 22.0))) == pytest.approx(2.0)
    assert CODE_ONE_SPEC.admits(summary_with((-48.0, 22.0), sll_db=-12.0))


def test_each_target_needs_its_own_lobe():
    spec = BeamSpec(targets=((-9.0, 3.0), (-11.0, 3.0)), required_beams=2)
    assert spec.match_error(summary_with((-10.0, 10.0))) is None


def test_spec_rejections():
    assert CODE_ONE_SPEC.match_error(summary_with((-48.0,))) is None
    assert CODE_ONE_SPEC.match_error(summary_with((-40.0, 22.0))) is None
    strict = BeamSpec(targets=CODE_ONE_SPEC.targets, required_beams=2, max_sll_db=-15.0)
    assert strict.match_error(summary_with((-48.0, 22.0), sll_db=-12.0)) is None
    loud = BeamSpec(targets=CODE_ONE_SPEC.targets, required_beams=2, min_peak_dbi=11.0)
    assert loud.match_error(summary_with((-48.0, 22.0), peak_dbi=10.0)) is None


@pytest.mark.parametrize("kwargs", [
    {"targets": (), "required_beams": 1},
    {"targets": ((0.0, 0.0),), "required_beams": 1},
    {"targets": ((95.0, 5.0),), "required_beams": 1},
    {"targets": ((0.0, 5.0),), "required_beams": 0},
    {"targets": ((0.0, 5.0),), "required_beams": 1, "max_sll_db": 1.0},
])
def test_beam_spec_validation(kwargs):
    with pytest.raises(CodebookError):
        BeamSpec(**kwargs)


# ==============================
# Metrics and synthesis
# ==============================

def test_code_one_meets_its_own_lobes(geometry, model):
    metrics = evaluate_code(0x9249, geometry, model, FREQUENCY, azimuth_grid(0.25), CODE_ONE_SPEC)
    assert metrics.feasible
    assert metrics.match_error_deg < 10.0
    assert metrics.code.to_hex() == "0x9249"


def test_evaluation_is_repeatable(geometry, model):
    grid = azimuth_grid(0.5)
    first = evaluate_code(0xAA80, geometry, model, FREQUENCY, grid)
    second = evaluate_code(0xAA80, geometry, model, FREQUENCY, grid)
    assert first == second
    direct = beam_summary(array_pattern(geometry, model, CodeWord.from_int(0xAA80), FREQUENCY, grid))
    assert first.summary == direct


def test_enumeration_covers_every_code_in_order(small_geometry, model):
    values = [m.code_int for m in enumerate_metrics(small_geometry, model, FREQUENCY, azimuth_grid(1.0))]
    assert values == list(range(256))


def test_enumeration_limit(model):
    geom = GuideGeometry(n_elements=25)
    with pytest.raises(CodebookError):
        next(enumerate_metrics(geom, model, FREQUENCY, azimuth_grid(1.0)))


def test_ranking_ignores_input_order(small_geometry, model):
    grid = azimuth_grid(1.0)
    spec = BeamSpec(targets=((0.0, 90.0),), required_beams=1)
    metrics = list(enumerate_metrics(small_geometry, model, FREQUENCY, grid, spec))
    ranked = synthesize(spec, small_geometry, model, FREQUENCY, grid, metrics=metrics)
    assert ranked
    assert [rank_key(m) for m in ranked] == sorted(rank_key(m) for m in ranked)
    shuffled = metrics[:]
    random.Random(3).shuffle(shuffled)
    again = synthesize(spec, small_geometry, model, FREQUENCY, grid, metrics=shuffled)
    assert [m.code_int for m in again] == [m.code_int for m in ranked]
    assert all(m.summary.n_beams == 1 for m in ranked)


def test_unsatisfiable_spec_gives_empty_ranking(small_geometry, model):
    spec = BeamSpec(targets=((0.0, 90.0),), required_beams=1, min_peak_dbi=100.0)
    assert synthesize(spec, small_geometry, model, FREQUENCY, azimuth_grid(1.0)) == []


@pytest.mark.slow
def test_parallel_enumeration_matches_serial(model):
    geom = GuideGeometry.anchored(13, 1.407e-3, FREQUENCY)
    grid = azimuth_grid(1.0)
    serial = list(enumerate_metrics(geom, model, FREQUENCY, grid, CODE_ONE_SPEC, workers=1))
    parallel = list(enumerate_metrics(geom, model, FREQUENCY, grid, CODE_ONE_SPEC, workers=2))
    assert serial == parallel


@pytest.mark.slow
def test_full_enumeration_row_count(geometry, model):
    values = [m.code_int for m in enumerate_metrics(geometry, model, FREQUENCY, azimuth_grid(0.25))]
    assert len(values) == 65_536
    assert values == list(range(65_536))


@pytest.mark.slow
def test_full_search_finds_code_one(geometry, model):
    ranked = synthesize(CODE_ONE_SPEC, geometry, model, FREQUENCY, azimuth_grid(0.25))
    assert 0x9249 in {m.code_int for m in ranked}


# ==============================
# Reference codes
# ==============================

def test_reference_check_on_constructed_summary():
    code_one = REFERENCE_BEAMS[0]
    good = check_reference(code_one, summary_with((-47.0, 22.0)))
    assert good.passed
    assert good.mld_residuals == pytest.approx((2.0, -1.0))
    flipped = check_reference(code_one, summary_with((-47.0, -20.0)))
    assert flipped.count_match and not flipped.sign_match


def test_verify_reference_codes(geometry, model):
    checks = verify_reference_codes(geometry, model, FREQUENCY)
    assert [c.name for c in checks] == [ref.name for ref in REFERENCE_BEAMS]
    assert checks[0].passed
    assert checks[0].expected_gains_dbi == (11.12, 11.85)
    assert len(checks[0].found_gains_dbi) == 2


# ==============================
# Directional hop set
# ==============================

def test_hop_set_keeps_protected_field_steady(geometry, model):
    code_one = CodeWord.from_int(0x9249)
    protect = beam_summary(array_pattern(geometry, model, code_one, FREQUENCY, azimuth_grid(0.25))).lobe_directions
    hop = directional_hop_set(geometry, model, FREQUENCY, code_one, protect, max_codes=6)
    assert hop.codes[0] == code_one
    assert 1 <= len(hop) <= 6
    assert len({c.to_int() for c in hop.codes}) == len(hop)
    assert hop.max_deviation <= 0.35

    bits = np.array([c.bits for c in hop.codes])
    fields = code_fields(geometry, model, bits, FREQUENCY, np.array(hop.protect_deg))
    mean = fields.mean(axis=0)
    assert np.max(np.abs(fields / mean - 1)) == pytest.approx(hop.max_deviation)


def test_hop_set_validation(geometry, model):
    code_one = CodeWord.from_int(0x9249)
    with pytest.raises(CodebookError):
        directional_hop_set(geometry, model, FREQUENCY, code_one, (), tolerance=0.3)
    with pytest.raises(CodebookError):
        directional_hop_set(geometry, model, FREQUENCY, code_one, (-49.0,), tolerance=1.5)
    with pytest.raises(CodebookError):
        directional_hop_set(geometry, model, FREQUENCY, code_one, (-49.0,), max_codes=0)
