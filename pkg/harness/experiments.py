# harness/experiments.py

import asyncio
from concurrent.futures import ProcessPoolExecutor
from functools import partial
import json
import logging
import math
import os

import numpy as np

from antenna import array_pattern, azimuth_grid, beam_summary, calibrate
from codebook import (
    MAX_ENUMERATION_BITS,
    directional_hop_set,
    enumerate_metrics,
    synthesize,
    verify_reference_codes,
)
from config import ConfigError, parse_targets
from data import (
    EVENTS_SCHEMA,
    LINK_SCHEMA,
    METRICS_SCHEMA,
    PATTERN_SCHEMA,
    RANKED_SCHEMA,
    RESIDUALS_SCHEMA,
    SWEEP_SCHEMA,
    TIMELINE_SCHEMA,
    backup_file_async,
    event_rows,
    link_row,
    metrics_row,
    pattern_rows,
    ranked_rows,
    read_bytes,
    read_json,
    residual_row,
    summary_row,
    sweep_row,
    timeline_rows,
    write_bytes,
    write_csv,
    write_json,
    write_manifest,
)
from link import BeamSchedule, modulate, run_link
from network import (
    APPLY_LATENCY_TICKS,
    BeamControlProtocol,
    BeamSteeringEmulator,
    Mode,
    SetCodeList,
    SetMode,
    SetSwitchInterval,
    TraceTransport,
    encode,
    radiation_timeline,
    switching_rate_check,
)
from utils import STREAM_ANGLE_SWEEP, STREAM_LINK_POINT, STREAM_PAYLOAD, STREAM_SNR_POINT, point_rng
from . import __version__


class HarnessFailure(RuntimeError):
    """An experiment ran but its result is infeasible or fails acceptance."""


def _out_path(exp, name):
    return os.path.join(exp.out_dir, name)


def _prepare(exp, command):
    os.makedirs(exp.out_dir, exist_ok=True)
    logging.info(f"{command}: seed {exp.seed}, output in {exp.out_dir}")


async def _finish(exp, command, files):
    return await write_manifest(exp.out_dir, command, __version__, exp.seed, exp.settings, files)


def _pattern(exp, code, step_deg=None):
    grid = azimuth_grid(exp.grid_step_deg if step_deg is None else step_deg)
    return array_pattern(exp.geometry, exp.model, code, exp.frequency, grid)


async def _run_points(workers, calls):
    """
    Evaluate CPU-bound calls in an executor and return results in call order.

    A process pool is used when `workers` > 1, the default thread pool otherwise.
    """
    loop = asyncio.get_running_loop()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return await asyncio.gather(*(loop.run_in_executor(pool, call) for call in calls))
    return await asyncio.gather(*(loop.run_in_executor(None, call) for call in calls))


# ==============================
# pattern
# ==============================

async def cmd_pattern(exp):
    """
    Pattern cut and beam summary for every configured code.

    Writes pattern_<index>.csv per code and summary.csv with one row per code.
    :return: List of (CodeWord, BeamSummary).
    """
    _prepare(exp, "pattern")
    files, rows, results = [], [], []
    for index, code in enumerate(exp.codes):
        cut = _pattern(exp, code)
        summary = beam_summary(cut, exp.detect_threshold_db)
        logging.info(f"Code {code.to_hex()}: {summary.n_beams} beam(s) at "
                     f"{tuple(round(a, 2) for a in summary.lobe_directions)} deg")
        files.append(await write_csv(_out_path(exp, f"pattern_{index}.csv"), PATTERN_SCHEMA, pattern_rows(cut)))
        rows.append(summary_row(code, summary))
        results.append((code, summary))
    files.append(await write_csv(_out_path(exp, "summary.csv"), METRICS_SCHEMA, rows))
    await _finish(exp, "pattern", files)
    return results


# ==============================
# search
# ==============================

def _search(exp):
    grid = azimuth_grid(exp.codebook_grid_step_deg)
    rows = []

    def recorded():
        for item in enumerate_metrics(exp.geometry, exp.model, exp.frequency, grid, exp.beam_spec,
                                      exp.detect_threshold_db, exp.workers):
            rows.append(metrics_row(item))
            yield item

    ranked = synthesize(exp.beam_spec, exp.geometry, exp.model, exp.frequency, grid,
                        metrics=recorded(), detect_threshold_db=exp.detect_threshold_db)
    return rows, ranked


async def cmd_search(exp):
    """
    Enumerate every code, write metrics.csv and the ranked feasible codes to ranked.csv.

    An unsatisfiable beam spec leaves ranked.csv with only its header.
    :return: Ranked CodeMetrics.
    """
    if exp.geometry.n_elements > MAX_ENUMERATION_BITS:
        raise ConfigError(f"Enumeration limited to {MAX_ENUMERATION_BITS} elements", field="em_model.n_elements")
    _prepare(exp, "search")
    rows, ranked = await asyncio.to_thread(_search, exp)
    if exp.codebook_top:
        ranked = ranked[:exp.codebook_top]
    if not ranked:
        logging.warning("No code satisfies the beam spec")
    files = [
        await write_csv(_out_path(exp, "metrics.csv"), METRICS_SCHEMA, rows),
        await write_csv(_out_path(exp, "ranked.csv"), RANKED_SCHEMA, ranked_rows(ranked)),
    ]
    await _finish(exp, "search", files)
    return ranked


# ==============================
# link
# ==============================

async def _payload(exp):
    if exp.payload_file:
        return await read_bytes(exp.payload_file)
    return point_rng(exp.seed, STREAM_PAYLOAD).bytes(exp.payload_bytes)


def _hop_schedule(exp, reference, cut, payload):
    """Program the emulator with a directional hop set around `reference` and derive the beam schedule."""
    protect = beam_summary(cut, exp.detect_threshold_db).lobe_directions
    if not protect:
        raise HarnessFailure(f"Code {reference.to_hex()} has no beam to protect")
    hop = directional_hop_set(exp.geometry, exp.model, exp.frequency, reference, protect,
                              tolerance=exp.hop.tolerance, max_codes=exp.hop.max_codes,
                              guard_deg=exp.hop.guard_deg)
    rate = switching_rate_check(exp.hop.interval_ticks, exp.link.symbol_rate, exp.clock_hz)
    logging.info(f"Hop set {[c.to_hex() for c in hop.codes]}, switching/symbol ratio {rate.ratio:.2f}"
                 f"{'' if rate.capable else ' (slower than the symbol rate)'}")

    emulator = BeamSteeringEmulator()
    initial_word = emulator.radiation_word
    program = (encode(SetCodeList(hop.codes)) + encode(SetSwitchInterval(exp.hop.interval_ticks))
               + encode(SetMode(Mode.MULTI)))
    events = emulator.step(program, APPLY_LATENCY_TICKS)
    start_tick = emulator.state.clock_ticks
    frame = modulate(exp.link, payload).frame
    burst_ticks = math.ceil(frame.samples.size / frame.sample_rate * exp.clock_hz) + exp.hop.interval_ticks
    events += emulator.step(b'', burst_ticks)
    timeline = radiation_timeline(events, initial_word=initial_word)
    patterns = {code.to_int(): _pattern(exp, code) for code in hop.codes}
    schedule = BeamSchedule.from_timeline(timeline, patterns, start_tick, clock_hz=exp.clock_hz)
    return schedule, timeline


async def cmd_link(exp):
    """
    Send the payload with the first configured code to every receiver angle.

    Writes link_report.csv, rx_<index>.bin, and the optional ber_vs_angle.csv /
    ber_vs_snr.csv sweeps. Uncorrectable blocks are reported, not raised.
    :return: LinkReports of the receiver angles.
    """
    _prepare(exp, "link")
    payload = await _payload(exp)
    code = exp.codes[0]
    cut = _pattern(exp, code)
    files = []
    schedule = None
    if exp.hop.enabled:
        schedule, timeline = await asyncio.to_thread(_hop_schedule, exp, code, cut, payload)
        files.append(await write_csv(_out_path(exp, "timeline.csv"), TIMELINE_SCHEMA,
                                     timeline_rows(timeline, exp.geometry.n_elements)))

    calls = [partial(run_link, exp.link, cut, angle, payload, point_rng(exp.seed, STREAM_LINK_POINT, i), schedule)
             for i, angle in enumerate(exp.link_angles_deg)]
    reports = await _run_points(exp.workers, calls)
    files.append(await write_csv(_out_path(exp, "link_report.csv"), LINK_SCHEMA,
                                 [link_row(i, r) for i, r in enumerate(reports)]))
    for i, report in enumerate(reports):
        files.append(await write_bytes(_out_path(exp, f"rx_{i}.bin"), report.payload))

    if exp.angle_sweep is not None:
        start, stop, step = exp.angle_sweep
        angles = np.round(np.arange(start, stop + step / 2, step), 9)
        calls = [partial(run_link, exp.link, cut, float(a), payload,
                         point_rng(exp.seed, STREAM_ANGLE_SWEEP, i), schedule)
                 for i, a in enumerate(angles)]
        sweep = await _run_points(exp.workers, calls)
        files.append(await write_csv(_out_path(exp, "ber_vs_angle.csv"), SWEEP_SCHEMA, map(sweep_row, sweep)))

    if exp.snr_sweep_db is not None:
        calls = [partial(run_link, exp.link, cut, exp.snr_sweep_angle_deg, payload,
                         point_rng(exp.seed, STREAM_SNR_POINT, i), schedule, snr)
                 for i, snr in enumerate(exp.snr_sweep_db)]
        sweep = await _run_points(exp.workers, calls)
        files.append(await write_csv(_out_path(exp, "ber_vs_snr.csv"), SWEEP_SCHEMA, map(sweep_row, sweep)))

    await _finish(exp, "link", files)
    return reports


# ==============================
# calibrate
# ==============================

async def _targets(exp):
    settings = exp.calibration
    if not settings.targets_file:
        return settings.targets
    try:
        entries = await read_json(settings.targets_file)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {settings.targets_file}: {e.msg}", field="em_model.calibration.targets_file",
                          line=e.lineno) from e
    return parse_targets(entries, exp.settings["em_model"]["code_radix"], exp.geometry.n_elements,
                         "em_model.calibration.targets_file")


async def cmd_calibrate(exp):
    """
    Fit guide and element parameters to the calibration targets.

    Writes calibration.json (read back through em_model.parameters = "calibrated")
    and residuals.csv.
    :raises HarnessFailure: When a lobe count or sign mismatches, or a pointing
        residual exceeds em_model.calibration.max_residual_deg.
    """
    _prepare(exp, "calibrate")
    targets = await _targets(exp)
    geom, model, report = await asyncio.to_thread(
        calibrate, targets, exp.calibration.ranges, exp.geometry, exp.model)
    for residual in report.residuals:
        logging.info(f"{residual.name}: expected {residual.expected_lobes}, "
                     f"fitted {tuple(round(a, 2) for a in residual.fitted_lobes)}, "
                     f"max error {residual.max_abs_error:.2f} deg")
    for check in verify_reference_codes(geom, model, exp.frequency, detect_threshold_db=exp.detect_threshold_db):
        logging.debug(f"{check.name} gains: reference {check.expected_gains_dbi} dBi, "
                      f"model {tuple(round(g, 2) for g in check.found_gains_dbi)} dBi")

    calibration_path = _out_path(exp, "calibration.json")
    await backup_file_async(calibration_path)
    files = [
        await write_json(calibration_path, {
            "parameters": report.parameters,
            "cost": report.cost,
            "evaluations": report.evaluations,
            "frequency": exp.calibration.ranges.frequency,
            "n_elements": geom.n_elements,
        }),
        await write_csv(_out_path(exp, "residuals.csv"), RESIDUALS_SCHEMA, map(residual_row, report.residuals)),
    ]
    await _finish(exp, "calibrate", files)

    if report.failed:
        raise HarnessFailure(f"Calibration misses {', '.join(report.failed)} "
                             f"(limit {exp.calibration.ranges.max_residual_deg} deg)")
    return geom, model, report


# ==============================
# proto-trace
# ==============================

async def cmd_proto_trace(exp, trace_file=None):
    """
    Feed a captured control byte stream to the emulator and dump what it did.

    Writes timeline.csv (radiation word changes, power-up word first),
    events.csv (changes, ACKs and NACKs) and replies.bin (bytes sent back).
    :return: Timeline events.
    """
    path = trace_file or exp.trace_file
    if not path:
        raise ConfigError("No control trace given", field="control_proto.trace_file")
    _prepare(exp, "proto-trace")
    data = await read_bytes(path)

    emulator = BeamSteeringEmulator()
    initial_word = emulator.radiation_word
    transport = TraceTransport()
    protocol = BeamControlProtocol(emulator)
    protocol.connection_made(transport)
    protocol.data_received(data)
    protocol.advance(exp.trace_ticks)
    protocol.connection_lost(None)

    state = emulator.state
    rate = switching_rate_check(state.interval_ticks, exp.link.symbol_rate, exp.clock_hz)
    logging.info(f"Trace of {len(data)} bytes: {len(protocol.events)} event(s), "
                 f"interval {state.interval_ticks} tick(s), switching/symbol ratio {rate.ratio:.2f}")

    n_bits = exp.geometry.n_elements
    files = [
        await write_csv(_out_path(exp, "timeline.csv"), TIMELINE_SCHEMA,
                        timeline_rows(radiation_timeline(protocol.events, initial_word=initial_word), n_bits)),
        await write_csv(_out_path(exp, "events.csv"), EVENTS_SCHEMA, event_rows(protocol.events, n_bits)),
        await write_bytes(_out_path(exp, "replies.bin"), bytes(transport.written)),
    ]
    await _finish(exp, "proto-trace", files)
    return protocol.events
