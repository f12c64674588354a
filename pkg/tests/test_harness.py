# tests/test_harness.py

import asyncio
import json
import os

import pytest

from antenna import CodeWord, array_pattern, azimuth_grid, beam_summary
from config import ConfigError
from data import (
    LINK_SCHEMA,
    METRICS_SCHEMA,
    RANKED_SCHEMA,
    RESIDUALS_SCHEMA,
    TIMELINE_SCHEMA,
    load_manifest,
    read_csv,
    verify_manifest,
)
from harness import (
    HarnessFailure,
    cmd_calibrate,
    cmd_link,
    cmd_pattern,
    cmd_proto_trace,
    cmd_search,
)
from main import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main
from network import (
    Mode,
    SetCodeList,
    SetMode,
    SetSwitchInterval,
    encode,
)
from network.frames import frame_bytes
from utils import STREAM_PAYLOAD, point_rng

BROADSIDE_CALIBRATION = {
    "targets": [{"code": "1111111111111111", "lobes_deg": [0], "name": "broadside"}],
    "spacing_d": [1.407e-3, 1.407e-3, 1],
    "off_leakage_rho": [1 / 3],
    "off_state_phase_rad": [0.0, 0.0, 1],
    "refine_levels": 0,
}


def table(path, schema):
    return asyncio.run(read_csv(path, schema))


@pytest.fixture
def control_trace(tmp_path):
    program = (encode(SetCodeList((CodeWord.from_int(0x9249), CodeWord.from_int(0xAAAA))))
               + encode(SetSwitchInterval(100))
               + encode(SetMode(Mode.MULTI))
               + frame_bytes(0x7F, b''))
    path = tmp_path / "trace.bin"
    path.write_bytes(program)
    return str(path)


# ==============================
# pattern / search
# ==============================

def test_pattern_outputs_and_manifest(make_experiment, tmp_path):
    overrides = {"em_model": {"grid_step_deg": 1.0}}
    exp = make_experiment(overrides, out_dir=tmp_path / "a")
    results = asyncio.run(cmd_pattern(exp))
    assert len(results) == 1
    code, summary = results[0]
    assert code.to_hex() == "0x9249"
    assert summary.n_beams == 2

    for name in ("pattern_0.csv", "summary.csv", "manifest.json"):
        assert os.path.isfile(os.path.join(exp.out_dir, name))
    assert asyncio.run(verify_manifest(exp.out_dir)) == []

    again = make_experiment(overrides, out_dir=tmp_path / "b")
    asyncio.run(cmd_pattern(again))
    first = asyncio.run(load_manifest(exp.out_dir))
    second = asyncio.run(load_manifest(again.out_dir))
    assert first.outputs == second.outputs
    assert first.seed == 0 and first.command == "pattern"


def test_search_on_a_short_row(make_experiment):
    exp = make_experiment({
        "em_model": {"n_elements": 8, "codes": ["10010010"]},
        "codebook": {"targets": [[0.0, 90.0]], "required_beams": 1, "grid_step_deg": 1.0},
    })
    ranked = asyncio.run(cmd_search(exp))
    assert ranked
    assert len(table(os.path.join(exp.out_dir, "metrics.csv"), METRICS_SCHEMA)) == 256
    rows = table(os.path.join(exp.out_dir, "ranked.csv"), RANKED_SCHEMA)
    assert [r["code_hex"] for r in rows] == [m.code_int for m in ranked]
    assert [r["rank"] for r in rows] == list(range(1, len(rows) + 1))


def test_unsatisfiable_search_writes_header_only(make_experiment):
    exp = make_experiment({
        "em_model": {"n_elements": 8, "codes": ["10010010"]},
        "codebook": {"targets": [[0.0, 90.0]], "required_beams": 1, "grid_step_deg": 1.0,
                     "min_peak_dbi": 100.0},
    })
    assert asyncio.run(cmd_search(exp)) == []
    assert table(os.path.join(exp.out_dir, "ranked.csv"), RANKED_SCHEMA) == []


def test_search_refuses_long_rows(make_experiment):
    exp = make_experiment({"em_model": {"n_elements": 32, "codes": ["1" * 32]}})
    with pytest.raises(ConfigError):
        asyncio.run(cmd_search(exp))


# ==============================
# link
# ==============================

def test_link_recovers_generated_payload(make_experiment):
    exp = make_experiment({"dvb_link": {"payload_bytes": 400, "angles_deg": [-49.0]}})
    reports = asyncio.run(cmd_link(exp))
    assert len(reports) == 1
    assert reports[0].payload_recovered

    with open(os.path.join(exp.out_dir, "rx_0.bin"), "rb") as f:
        assert f.read() == point_rng(exp.seed, STREAM_PAYLOAD).bytes(400)
    rows = table(os.path.join(exp.out_dir, "link_report.csv"), LINK_SCHEMA)
    assert rows[0]["recovered"] is True
    assert rows[0]["angle_deg"] == -49.0


def test_link_reads_payload_file(make_experiment, tmp_path):
    payload = tmp_path / "payload.bin"
    payload.write_bytes(b'dma' * 50)
    exp = make_experiment({"dvb_link": {"payload_file": str(payload), "angles_deg": [-49.0]}})
    reports = asyncio.run(cmd_link(exp))
    assert reports[0].payload == b'dma' * 50


@pytest.mark.slow
def test_hopping_link_writes_its_timeline(make_experiment):
    exp = make_experiment({"dvb_link": {"payload_bytes": 400, "angles_deg": [-49.0],
                                        "hop": {"enabled": True, "max_codes": 4}}})
    asyncio.run(cmd_link(exp))
    rows = table(os.path.join(exp.out_dir, "timeline.csv"), TIMELINE_SCHEMA)
    assert len(rows) > 1
    assert rows[0]["radiation_word_hex"] == 0xFFFF


@pytest.mark.slow
def test_hopping_hides_the_payload_off_the_lobes(make_experiment):
    shipped = make_experiment()
    cut = array_pattern(shipped.geometry, shipped.model, shipped.codes[0],
                        shipped.frequency, azimuth_grid(shipped.grid_step_deg))
    lobes = beam_summary(cut, shipped.detect_threshold_db).lobe_directions
    assert len(lobes) == 2

    exp = make_experiment({"dvb_link": {"extra_tx_gain_db": 20.0, "payload_bytes": 1500,
                                        "angles_deg": [*lobes, -49.0, 23.0, -15.0, 12.0]}})
    assert exp.hop.enabled
    reports = asyncio.run(cmd_link(exp))
    intended, eavesdroppers = reports[:4], reports[4:]
    for report in intended:
        assert report.payload_recovered, report.angle_deg
        assert report.prefec_ber < 0.01
    for report in eavesdroppers:
        assert not report.payload_recovered, report.angle_deg
        assert report.prefec_ber > 0.1
        assert report.snr_db > 40


# ==============================
# calibrate
# ==============================

def test_calibration_feeds_the_model(make_experiment):
    exp = make_experiment({"em_model": {"calibration": BROADSIDE_CALIBRATION}})
    geom, model, report = asyncio.run(cmd_calibrate(exp))
    assert report.residuals[0].count_match
    calibration_file = os.path.join(exp.out_dir, "calibration.json")
    with open(calibration_file) as f:
        saved = json.load(f)
    assert saved["parameters"]["spacing_d"] == pytest.approx(1.407e-3)

    calibrated = make_experiment({"em_model": {"parameters": "calibrated",
                                               "calibration_file": calibration_file}})
    assert calibrated.geometry.eps_eff == pytest.approx(geom.eps_eff)
    assert calibrated.model.off_state_phase_rad == model.off_state_phase_rad


def test_calibration_failure_still_writes_residuals(make_experiment):
    targets = [{"code": "1111111111111111", "lobes_deg": [30], "name": "off"}]
    exp = make_experiment({"em_model": {"calibration": dict(BROADSIDE_CALIBRATION, targets=targets)}})
    with pytest.raises(HarnessFailure):
        asyncio.run(cmd_calibrate(exp))
    rows = table(os.path.join(exp.out_dir, "residuals.csv"), RESIDUALS_SCHEMA)
    assert rows[0]["target"] == "off"
    assert rows[0]["max_abs_error"] > 10


def test_bad_targets_file(make_experiment, tmp_path):
    path = tmp_path / "targets.json"
    path.write_text('[\n  {"code": }\n]\n')
    exp = make_experiment({"em_model": {"calibration": {"targets_file": str(path)}}})
    with pytest.raises(ConfigError) as excinfo:
        asyncio.run(cmd_calibrate(exp))
    assert excinfo.value.line == 2


# ==============================
# proto-trace
# ==============================

def test_proto_trace(make_experiment, control_trace):
    exp = make_experiment()
    asyncio.run(cmd_proto_trace(exp, control_trace))
    with open(os.path.join(exp.out_dir, "replies.bin"), "rb") as f:
        assert f.read() == bytes((0x06, 0x06, 0x06, 0x15))
    rows = table(os.path.join(exp.out_dir, "timeline.csv"), TIMELINE_SCHEMA)
    assert [(r["tick"], r["radiation_word_hex"]) for r in rows[:3]] == [(0, 0xFFFF), (1, 0x9249), (101, 0xAAAA)]


def test_proto_trace_needs_a_file(make_experiment):
    with pytest.raises(ConfigError):
        asyncio.run(cmd_proto_trace(make_experiment()))


# ==============================
# Command line
# ==============================

def test_main_exit_codes(tmp_path, control_trace):
    assert main(["proto-trace", control_trace, "--out", str(tmp_path / "trace")]) == EXIT_OK
    assert main(["pattern", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG

    config = tmp_path / "calibrate.json"
    targets = [{"code": "1111111111111111", "lobes_deg": [30]}]
    config.write_text(json.dumps({"em_model": {"calibration": dict(BROADSIDE_CALIBRATION, targets=targets)}}))
    assert main(["calibrate", "--config", str(config), "--out", str(tmp_path / "cal")]) == EXIT_FAILURE
