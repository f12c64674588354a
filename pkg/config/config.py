# config/config.py

import copy
from dataclasses import dataclass, replace
from fractions import Fraction
import json
import logging
import math
import os

from antenna import (
    CalibrationTarget,
    ElementModel,
    GuideGeometry,
    SearchRanges,
    reference_targets,
)
from codebook import BeamSpec
from link import LinkConfig
from network import CodeTextError, parse_code_text
from network.codes import RADIXES
from utils import check_seed

# Path to settings file
SETTINGS_FILE = os.path.join(os.path.dirname(__file__), "settings.json")

PARAMETER_SOURCES = ("default", "calibrated")


class ConfigError(ValueError):
    """Invalid configuration, located by dotted field path and, for syntax errors, line."""

    def __init__(self, message, field=None, line=None):
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)
        self.field = field
        self.line = line


def create_default_settings():
    # Defaults reproduce the 62 GHz lab link at 1 m with the calibrated element row
    settings = {
        "em_model": {
            "parameters": "default",
            "calibration_file": "out/calibration.json",
            "n_elements": 16,
            "spacing_d": 1.40215e-3,
            "eps_eff": 11.892388,
            "f0": 60.6e9,
            "coupling_F": 1.0,
            "damping_gamma": 2 * math.pi * 3.0e9,
            "off_leakage_rho": 1.0 / 3.0,
            "off_state_phase_rad": -1.3962634015954636,
            "frequency": 62e9,
            "codes": ["1001001001001001"],
            "code_radix": "bin",
            "grid_step_deg": 0.25,
            "detect_threshold_db": -10.0,
            "calibration": {
                "targets": None,
                "targets_file": None,
                "include_broadside": True,
                "spacing_d": [0.967e-3, 3.868e-3, 31],
                "eps_eff": None,
                "off_leakage_rho": [0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5, 2.0 / 3.0],
                "off_state_phase_rad": [-math.pi, math.pi, 37],
                "refine_levels": 2,
                "grid_step_deg": 0.5,
                "penalty_deg2": 400.0,
                "max_residual_deg": 10.0,
            },
        },
        "codebook": {
            "targets": [[-49.0, 5.0], [23.0, 5.0]],
            "required_beams": 2,
            "max_sll_db": 0.0,
            "min_peak_dbi": None,
            "grid_step_deg": 0.25,
            "top": 0,
        },
        "dvb_link": {
            "baseband_hz": 1e9,
            "rf_hz": 62e9,
            "tx_power_dbm": 7.0,
            "dma_gain_dbi": None,
            "rx_horn_gain_dbi": 15.5,
            "rx_chain_gain_db": 32.0,
            "distance_m": 1.0,
            "symbol_rate": 2e6,
            "code_rate": "5/6",
            "noise_figure_db": 7.0,
            "rolloff": 0.35,
            "samples_per_symbol": 4,
            "rrc_span_symbols": 12,
            "temperature_k": 290.0,
            "extra_tx_gain_db": 0.0,
            "payload_file": None,
            "payload_bytes": 16384,
            "angles_deg": [-49.0, 23.0, -15.0, 12.0],
            "angle_sweep": None,
            "snr_sweep": None,
            "hop": {
                "enabled": True,
                "tolerance": 0.35,
                "max_codes": 16,
                "guard_deg": 5.0,
                "interval_ticks": 50,
            },
        },
        "control_proto": {
            "clock_hz": 100e6,
            "trace_file": None,
            "trace_ticks": 1000,
        },
        "harness": {
            "seed": 0,
            "out_dir": "out",
            "workers": 1,
            "log_file": "dma_twin.log",
        },
    }
    return settings


def save_settings(settings, path=SETTINGS_FILE):
    with open(path, "w") as f:
        json.dump(settings, f, indent=4)


def _read_json(path):
    with open(path, "r") as f:
        text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e.msg} at column {e.colno}", line=e.lineno) from e


def _check_type(default, value, field):
    if default is None or value is None:
        return
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, (int, float)):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if ok and isinstance(default, int) and not isinstance(value, int):
            ok = float(value).is_integer()
    else:
        ok = isinstance(value, type(default))
    if not ok:
        raise ConfigError(f"Expected {type(default).__name__}, got {type(value).__name__}", field=field)


def merge_settings(defaults, overrides, prefix=""):
    """
    Deep-merge `overrides` into a copy of `defaults`.

    Unknown keys and values whose type differs from the default are rejected.
    """
    merged = copy.deepcopy(defaults)
    if not isinstance(overrides, dict):
        raise ConfigError("Expected an object", field=prefix or None)
    for key, value in overrides.items():
        field = f"{prefix}.{key}" if prefix else key
        if key not in defaults:
            raise ConfigError("Unknown setting", field=field)
        default = defaults[key]
        if isinstance(default, dict):
            merged[key] = merge_settings(default, value, field)
        else:
            _check_type(default, value, field)
            merged[key] = copy.deepcopy(value)
    return merged


def load_settings(path=None):
    """
    Load the bundled defaults and merge the user file at `path` over them.

    A missing or unreadable bundled file is recreated from create_default_settings().
    """
    defaults = create_default_settings()
    if os.path.exists(SETTINGS_FILE):
        try:
            bundled = merge_settings(defaults, _read_json(SETTINGS_FILE))
        except ConfigError as e:
            logging.error(f"Error reading settings.json ({e}). Using default settings.")
            bundled = defaults
            save_settings(bundled)
    else:
        bundled = defaults
        save_settings(bundled)
    if path is None:
        return bundled
    if not os.path.isfile(path):
        raise ConfigError(f"Config file {path} not found")
    return merge_settings(bundled, _read_json(path))


# ==============================
# Resolved experiment
# ==============================

@dataclass(frozen=True)
class CalibrationSettings:
    targets: tuple
    targets_file: str | None
    ranges: SearchRanges


@dataclass(frozen=True)
class HopSettings:
    enabled: bool
    tolerance: float
    max_codes: int
    guard_deg: float
    interval_ticks: int


@dataclass(frozen=True)
class ExperimentConfig:
    """Concrete module inputs for one harness run; `settings` is the merged snapshot."""
    geometry: GuideGeometry
    model: ElementModel
    frequency: float
    codes: tuple
    grid_step_deg: float
    detect_threshold_db: float
    calibration: CalibrationSettings
    beam_spec: BeamSpec
    codebook_grid_step_deg: float
    codebook_top: int
    link: LinkConfig
    link_angles_deg: tuple
    payload_file: str | None
    payload_bytes: int
    angle_sweep: tuple | None
    snr_sweep_db: tuple | None
    snr_sweep_angle_deg: float | None
    hop: HopSettings
    clock_hz: float
    trace_file: str | None
    trace_ticks: int
    seed: int
    out_dir: str
    workers: int
    log_file: str | None
    settings: dict


def _get(settings, field):
    node = settings
    for key in field.split("."):
        node = node[key]
    return node


def _number(settings, field, minimum=None, positive=False, integer=False):
    value = _get(settings, field)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"Expected a finite number, got {value!r}", field=field)
    if integer:
        if not float(value).is_integer():
            raise ConfigError(f"Expected an integer, got {value!r}", field=field)
        value = int(value)
    if positive and not value > 0:
        raise ConfigError(f"Must be positive, got {value}", field=field)
    if minimum is not None and value < minimum:
        raise ConfigError(f"Must be at least {minimum}, got {value}", field=field)
    return value


def _optional_number(settings, field):
    return None if _get(settings, field) is None else _number(settings, field)


def parse_codes(texts, radix, n_bits, field):
    if not isinstance(texts, list) or not texts:
        raise ConfigError("Expected a non-empty list of codes", field=field)
    codes = []
    for i, text in enumerate(texts):
        try:
            codes.append(parse_code_text(str(text), radix, n_bits))
        except CodeTextError as e:
            raise ConfigError(str(e), field=f"{field}[{i}]") from e
    return tuple(codes)


def parse_targets(entries, radix, n_bits, field):
    """Calibration targets from [{"code": ..., "lobes_deg": [...], "weight": 1}] entries."""
    if not isinstance(entries, list) or not entries:
        raise ConfigError("Expected a non-empty list of calibration targets", field=field)
    targets = []
    for i, entry in enumerate(entries):
        where = f"{field}[{i}]"
        if not isinstance(entry, dict) or "code" not in entry or "lobes_deg" not in entry:
            raise ConfigError("Target needs 'code' and 'lobes_deg'", field=where)
        unknown = set(entry) - {"code", "lobes_deg", "weight", "name"}
        if unknown:
            raise ConfigError(f"Unknown target keys {sorted(unknown)}", field=where)
        (code,) = parse_codes([entry["code"]], radix, n_bits, f"{where}.code")
        try:
            targets.append(CalibrationTarget(code, tuple(entry["lobes_deg"]),
                                             weight=entry.get("weight", 1.0),
                                             name=str(entry.get("name", ""))))
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e), field=where) from e
    return tuple(targets)


def _range(settings, field):
    value = _get(settings, field)
    if value is None:
        return None
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError("Expected [low, high, steps]", field=field)
    return tuple(value)


def _calibrated_parameters(path):
    if not os.path.isfile(path):
        raise ConfigError(f"Calibration file {path} not found", field="em_model.calibration_file")
    data = _read_json(path)
    try:
        params = data["parameters"]
        return {key: float(params[key])
                for key in ("eps_eff", "spacing_d", "off_leakage_rho", "off_state_phase_rad")}
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Calibration file {path} lacks fitted parameters ({e})",
                          field="em_model.calibration_file") from e


def _resolve_em_model(settings):
    source = _get(settings, "em_model.parameters")
    if source not in PARAMETER_SOURCES:
        raise ConfigError(f"Expected one of {PARAMETER_SOURCES}, got {source!r}", field="em_model.parameters")
    try:
        geometry = GuideGeometry(
            n_elements=_number(settings, "em_model.n_elements", minimum=1, integer=True),
            spacing_d=_number(settings, "em_model.spacing_d", positive=True),
            eps_eff=_number(settings, "em_model.eps_eff", minimum=1),
        )
        model = ElementModel(
            f0=_number(settings, "em_model.f0", positive=True),
            coupling_F=_number(settings, "em_model.coupling_F", positive=True),
            damping_gamma=_number(settings, "em_model.damping_gamma", positive=True),
            off_leakage_rho=_number(settings, "em_model.off_leakage_rho", minimum=0),
            off_state_phase_rad=_number(settings, "em_model.off_state_phase_rad"),
        )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e), field="em_model") from e
    if source == "calibrated":
        params = _calibrated_parameters(_get(settings, "em_model.calibration_file"))
        try:
            geometry = replace(geometry, spacing_d=params["spacing_d"], eps_eff=params["eps_eff"])
            model = replace(model, off_leakage_rho=params["off_leakage_rho"],
                            off_state_phase_rad=params["off_state_phase_rad"])
        except ValueError as e:
            raise ConfigError(str(e), field="em_model.calibration_file") from e
        logging.info(f"Using calibrated parameters from {_get(settings, 'em_model.calibration_file')}")
    return geometry, model


def _resolve_calibration(settings, radix, n_bits, frequency, threshold):
    prefix = "em_model.calibration"
    entries = _get(settings, f"{prefix}.targets")
    if entries is None:
        targets = tuple(reference_targets(include_broadside=_get(settings, f"{prefix}.include_broadside")))
    else:
        targets = parse_targets(entries, radix, n_bits, f"{prefix}.targets")
    try:
        ranges = SearchRanges(
            spacing_d=_range(settings, f"{prefix}.spacing_d"),
            eps_eff=_range(settings, f"{prefix}.eps_eff"),
            off_leakage_rho=tuple(_get(settings, f"{prefix}.off_leakage_rho")),
            off_state_phase_rad=_range(settings, f"{prefix}.off_state_phase_rad"),
            refine_levels=_number(settings, f"{prefix}.refine_levels", minimum=0, integer=True),
            frequency=frequency,
            grid_step_deg=_number(settings, f"{prefix}.grid_step_deg", positive=True),
            penalty_deg2=_number(settings, f"{prefix}.penalty_deg2", positive=True),
            detect_threshold_db=threshold,
            max_residual_deg=_number(settings, f"{prefix}.max_residual_deg", positive=True),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e), field=prefix) from e
    return CalibrationSettings(
        targets=targets,
        targets_file=_get(settings, f"{prefix}.targets_file"),
        ranges=ranges,
    )


def _resolve_beam_spec(settings):
    min_peak = _optional_number(settings, "codebook.min_peak_dbi")
    try:
        return BeamSpec(
            targets=tuple(tuple(t) for t in _get(settings, "codebook.targets")),
            required_beams=_number(settings, "codebook.required_beams", minimum=1, integer=True),
            max_sll_db=_number(settings, "codebook.max_sll_db"),
            min_peak_dbi=-math.inf if min_peak is None else min_peak,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e), field="codebook.targets") from e


def _resolve_link(settings):
    section = "dvb_link"
    try:
        code_rate = Fraction(str(_get(settings, f"{section}.code_rate")))
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"Invalid code rate: {e}", field=f"{section}.code_rate") from e
    try:
        return LinkConfig(
            baseband_hz=_number(settings, f"{section}.baseband_hz", positive=True),
            rf_hz=_number(settings, f"{section}.rf_hz", positive=True),
            tx_power_dbm=_number(settings, f"{section}.tx_power_dbm"),
            dma_gain_dbi=_optional_number(settings, f"{section}.dma_gain_dbi"),
            rx_horn_gain_dbi=_number(settings, f"{section}.rx_horn_gain_dbi"),
            rx_chain_gain_db=_number(settings, f"{section}.rx_chain_gain_db"),
            distance_m=_number(settings, f"{section}.distance_m", positive=True),
            symbol_rate=_number(settings, f"{section}.symbol_rate", positive=True),
            code_rate=code_rate,
            noise_figure_db=_number(settings, f"{section}.noise_figure_db", minimum=0),
            rolloff=_number(settings, f"{section}.rolloff", positive=True),
            samples_per_symbol=_number(settings, f"{section}.samples_per_symbol", minimum=2, integer=True),
            rrc_span_symbols=_number(settings, f"{section}.rrc_span_symbols", minimum=2, integer=True),
            temperature_k=_number(settings, f"{section}.temperature_k", positive=True),
            extra_tx_gain_db=_number(settings, f"{section}.extra_tx_gain_db"),
        )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e), field=section) from e


def _resolve_sweeps(settings):
    angle = _get(settings, "dvb_link.angle_sweep")
    if angle is not None:
        if not isinstance(angle, list) or len(angle) != 3:
            raise ConfigError("Expected [start_deg, stop_deg, step_deg]", field="dvb_link.angle_sweep")
        start, stop, step = (float(a) for a in angle)
        if not (-90 <= start <= stop <= 90) or not step > 0:
            raise ConfigError("Angle sweep must satisfy -90 <= start <= stop <= 90, step > 0",
                              field="dvb_link.angle_sweep")
        angle = (start, stop, step)
    snr = _get(settings, "dvb_link.snr_sweep")
    snr_values, snr_angle = None, None
    if snr is not None:
        if not isinstance(snr, dict) or set(snr) != {"values_db", "angle_deg"}:
            raise ConfigError("Expected {'values_db': [...], 'angle_deg': ...}", field="dvb_link.snr_sweep")
        if not isinstance(snr["values_db"], list) or not snr["values_db"]:
            raise ConfigError("Expected a non-empty list", field="dvb_link.snr_sweep.values_db")
        snr_values = tuple(float(v) for v in snr["values_db"])
        snr_angle = _number(settings, "dvb_link.snr_sweep.angle_deg")
    return angle, snr_values, snr_angle


def resolve_experiment(settings, seed=None, out_dir=None):
    """
    Turn merged settings into concrete module inputs.

    :param seed: Overrides harness.seed when given.
    :param out_dir: Overrides harness.out_dir when given.
    :raises ConfigError: With the dotted path of the offending field.
    """
    settings = copy.deepcopy(settings)
    if seed is not None:
        settings["harness"]["seed"] = seed
    if out_dir is not None:
        settings["harness"]["out_dir"] = str(out_dir)
    try:
        run_seed = check_seed(settings["harness"]["seed"])
    except ValueError as e:
        raise ConfigError(str(e), field="harness.seed") from e

    geometry, model = _resolve_em_model(settings)
    radix = _get(settings, "em_model.code_radix")
    if radix not in RADIXES:
        raise ConfigError(f"Expected one of {sorted(RADIXES)}, got {radix!r}", field="em_model.code_radix")
    frequency = _number(settings, "em_model.frequency", positive=True)
    threshold = _number(settings, "em_model.detect_threshold_db")
    if not threshold < 0:
        raise ConfigError("Detection threshold must be negative", field="em_model.detect_threshold_db")
    codes = parse_codes(_get(settings, "em_model.codes"), radix, geometry.n_elements, "em_model.codes")
    angle_sweep, snr_values, snr_angle = _resolve_sweeps(settings)
    angles = _get(settings, "dvb_link.angles_deg")
    if not isinstance(angles, list) or any(isinstance(a, bool) or not isinstance(a, (int, float)) or not -90 <= a <= 90
                                                for a in angles):
        raise ConfigError("Expected a list of angles within [-90, 90]", field="dvb_link.angles_deg")

    hop = HopSettings(
        enabled=_get(settings, "dvb_link.hop.enabled"),
        tolerance=_number(settings, "dvb_link.hop.tolerance", positive=True),
        max_codes=_number(settings, "dvb_link.hop.max_codes", minimum=1, integer=True),
        guard_deg=_number(settings, "dvb_link.hop.guard_deg", minimum=0),
        interval_ticks=_number(settings, "dvb_link.hop.interval_ticks", minimum=1, integer=True),
    )
    if not hop.tolerance < 1:
        raise ConfigError("Must lie in (0, 1)", field="dvb_link.hop.tolerance")

    return ExperimentConfig(
        geometry=geometry,
        model=model,
        frequency=frequency,
        codes=codes,
        grid_step_deg=_number(settings, "em_model.grid_step_deg", positive=True),
        detect_threshold_db=threshold,
        calibration=_resolve_calibration(settings, radix, geometry.n_elements, frequency, threshold),
        beam_spec=_resolve_beam_spec(settings),
        codebook_grid_step_deg=_number(settings, "codebook.grid_step_deg", positive=True),
        codebook_top=_number(settings, "codebook.top", minimum=0, integer=True),
        link=_resolve_link(settings),
        link_angles_deg=tuple(float(a) for a in angles),
        payload_file=_get(settings, "dvb_link.payload_file"),
        payload_bytes=_number(settings, "dvb_link.payload_bytes", minimum=1, integer=True),
        angle_sweep=angle_sweep,
        snr_sweep_db=snr_values,
        snr_sweep_angle_deg=snr_angle,
        hop=hop,
        clock_hz=_number(settings, "control_proto.clock_hz", positive=True),
        trace_file=_get(settings, "control_proto.trace_file"),
        trace_ticks=_number(settings, "control_proto.trace_ticks", minimum=0, integer=True),
        seed=run_seed,
        out_dir=_get(settings, "harness.out_dir"),
        workers=_number(settings, "harness.workers", minimum=1, integer=True),
        log_file=_get(settings, "harness.log_file"),
        settings=settings,
    )
