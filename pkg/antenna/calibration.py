# antenna/calibration.py

from dataclasses import dataclass, replace, field
import itertools
import logging
import math

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .beams import beam_summary, DEFAULT_THRESHOLD_DB
from .element import ElementModel
from .geometry import CodeWord, GuideGeometry
from .pattern import array_pattern, azimuth_grid

REFINE_POINTS = 5
# Costs are compared after rounding so that numerically equal fits tie exactly
COST_DECIMALS = 9
# Expected lobes closer than this to broadside carry no sign requirement
BROADSIDE_SIGN_DEG = 2.0
# Pointing limit of a broadside-only target
BROADSIDE_TOLERANCE_DEG = 2.0
DEFAULT_MAX_RESIDUAL_DEG = 10.0


class CalibrationError(ValueError):
    pass


# ==============================
# Reference beams (full-wave simulation at 62 GHz)
# ==============================

@dataclass(frozen=True)
class ReferenceBeam:
    name: str
    code: CodeWord
    lobes_deg: tuple
    gains_dbi: tuple
    hpbw_deg: tuple


REFERENCE_BEAMS = (
    ReferenceBeam("Code 1", CodeWord.from_string("1001001001001001"), (-49.0, 23.0), (11.12, 11.85), (13.0, 11.0)),
    ReferenceBeam("Code 2", CodeWord.from_string("0001000100010001"), (-16.0, 31.0), (7.97, 7.95), (10.0, 17.5)),
    ReferenceBeam("Code 3", CodeWord.from_string("1010101010101010"), (-9.0,), (8.53,), (8.0,)),
    ReferenceBeam("Code 4", CodeWord.from_string("1001100110011001"), (-8.0,), (8.5,), (24.0,)),
    ReferenceBeam("Code 5", CodeWord.from_string("1010101010000000"), (36.0,), (10.2,), (13.5,)),
)
REFERENCE_FREQUENCY_HZ = 62e9


@dataclass(frozen=True)
class CalibrationTarget:
    code: CodeWord
    lobes_deg: tuple
    weight: float = 1.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, 'lobes_deg', tuple(float(a) for a in self.lobes_deg))
        if not self.lobes_deg:
            raise CalibrationError(f"Target {self.name or self.code} lists no lobes")
        if not self.weight > 0:
            raise CalibrationError(f"Target weight must be positive, got {self.weight}")

    @property
    def n_beams(self):
        return len(self.lobes_deg)


def reference_targets(include_broadside=True):
    """Calibration targets for the reference codes, plus the all-radiating broadside anchor."""
    targets = [CalibrationTarget(ref.code, ref.lobes_deg, name=ref.name) for ref in REFERENCE_BEAMS]
    if include_broadside:
        n_bits = len(REFERENCE_BEAMS[0].code)
        targets.append(CalibrationTarget(CodeWord.all_ones(n_bits), (0.0,), name="All ones"))
    return targets


# ==============================
# Search space
# ==============================

def _check_range(name, spec):
    if spec is None:
        return None
    try:
        lo, hi, steps = spec
    except (TypeError, ValueError):
        raise CalibrationError(f"{name} range must be (low, high, steps), got {spec!r}")
    steps = int(steps)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi or steps < 1:
        raise CalibrationError(f"Degenerate {name} range {spec!r}")
    if (steps == 1) != (lo == hi):
        raise CalibrationError(f"Degenerate {name} range {spec!r}: one step needs low == high")
    return float(lo), float(hi), steps


@dataclass(frozen=True)
class SearchRanges:
    """
    Grid-search box for calibrate().

    Continuous parameters are (low, high, steps) triples. eps_eff = None
    anchors eps_eff to each spacing so that beta*d = 2*pi*anchor_order at
    the calibration frequency. Candidates are ranked by the number of
    targets they miss first and by the pointing cost second; a target is
    missed on a count or sign mismatch or a residual above max_residual_deg.
    """
    spacing_d: tuple = (0.967e-3, 3.868e-3, 31)
    eps_eff: tuple | None = None
    off_leakage_rho: tuple = (0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5, 2.0 / 3.0)
    off_state_phase_rad: tuple = (-math.pi, math.pi, 37)
    refine_levels: int = 2
    frequency: float = REFERENCE_FREQUENCY_HZ
    grid_step_deg: float = 0.5
    penalty_deg2: float = 400.0
    detect_threshold_db: float = DEFAULT_THRESHOLD_DB
    anchor_order: int = 1
    max_residual_deg: float = DEFAULT_MAX_RESIDUAL_DEG

    def __post_init__(self):
        object.__setattr__(self, 'spacing_d', _check_range('spacing_d', self.spacing_d))
        object.__setattr__(self, 'eps_eff', _check_range('eps_eff', self.eps_eff))
        object.__setattr__(self, 'off_state_phase_rad',
                           _check_range('off_state_phase_rad', self.off_state_phase_rad))
        rho = tuple(float(r) for r in self.off_leakage_rho)
        if not rho or any(not 0 <= r < 1 for r in rho):
            raise CalibrationError(f"off_leakage_rho values must lie in [0, 1), got {self.off_leakage_rho!r}")
        object.__setattr__(self, 'off_leakage_rho', tuple(sorted(set(rho))))
        if self.refine_levels < 0:
            raise CalibrationError("refine_levels must be non-negative")
        if not self.frequency > 0 or not self.grid_step_deg > 0 or not self.penalty_deg2 > 0:
            raise CalibrationError("frequency, grid_step_deg and penalty_deg2 must be positive")
        if not self.max_residual_deg > 0:
            raise CalibrationError(f"max_residual_deg must be positive, got {self.max_residual_deg}")
        if self.spacing_d[0] <= 0:
            raise CalibrationError("spacing_d range must be positive")

    @property
    def anchored(self):
        return self.eps_eff is None

    def anchored_eps(self, spacing_d):
        return (self.anchor_order * SPEED_OF_LIGHT / (self.frequency * spacing_d)) ** 2


def _axis(spec):
    lo, hi, steps = spec
    return np.linspace(lo, hi, steps)


def _step(spec):
    lo, hi, steps = spec
    return (hi - lo) / (steps - 1) if steps > 1 else 0.0


# ==============================
# Fit report
# ==============================

@dataclass(frozen=True)
class TargetResidual:
    name: str
    code: CodeWord
    expected_lobes: tuple
    fitted_lobes: tuple
    mld_errors: tuple
    n_expected: int
    n_found: int
    sign_match: bool
    cost: float
    limit_deg: float = DEFAULT_MAX_RESIDUAL_DEG

    @property
    def count_match(self):
        return self.n_expected == self.n_found

    @property
    def max_abs_error(self):
        errors = [abs(e) for e in self.mld_errors if e is not None]
        if len(errors) < len(self.mld_errors):
            return math.inf
        return max(errors) if errors else 0.0

    @property
    def passed(self):
        return self.count_match and self.sign_match and self.max_abs_error <= self.limit_deg


@dataclass(frozen=True)
class FitReport:
    cost: float
    parameters: dict
    residuals: tuple = field(default_factory=tuple)
    evaluations: int = 0

    @property
    def failed(self):
        """Names of the targets the fitted model misses."""
        return tuple(r.name for r in self.residuals if not r.passed)


def match_lobes(expected, found):
    """Nearest found lobe for every expected lobe (None when nothing was found)."""
    if not found:
        return tuple(None for _ in expected)
    return tuple(min(found, key=lambda f: (abs(f - e), f)) for e in expected)


def score_target(target, summary, penalty_deg2, max_residual_deg=DEFAULT_MAX_RESIDUAL_DEG):
    """Residual of one target against a fitted beam summary."""
    found = summary.lobe_directions
    matched = match_lobes(target.lobes_deg, found)
    errors = tuple(None if m is None else m - e for m, e in zip(matched, target.lobes_deg))
    cost = penalty_deg2 * abs(len(found) - target.n_beams)
    cost += sum(penalty_deg2 if err is None else err ** 2 for err in errors)
    sign_match = all(
        m is not None and (abs(e) < BROADSIDE_SIGN_DEG or np.sign(m) == np.sign(e))
        for m, e in zip(matched, target.lobes_deg)
    )
    broadside = all(abs(e) < BROADSIDE_SIGN_DEG for e in target.lobes_deg)
    return TargetResidual(
        name=target.name or str(target.code),
        code=target.code,
        expected_lobes=target.lobes_deg,
        fitted_lobes=found,
        mld_errors=errors,
        n_expected=target.n_beams,
        n_found=len(found),
        sign_match=bool(sign_match),
        cost=target.weight * cost,
        limit_deg=BROADSIDE_TOLERANCE_DEG if broadside else max_residual_deg,
    )


# ==============================
# Search
# ==============================

class _Objective:
    def __init__(self, targets, ranges, base_geometry, base_model):
        self.targets = targets
        self.ranges = ranges
        self.base_geometry = base_geometry
        self.base_model = base_model
        self.grid = azimuth_grid(ranges.grid_step_deg)
        self.evaluations = 0

    def build(self, params):
        eps, d, rho, chi = params
        geom = replace(self.base_geometry, spacing_d=d, eps_eff=eps)
        model = replace(self.base_model, off_leakage_rho=rho, off_state_phase_rad=chi)
        return geom, model

    def residuals(self, params):
        geom, model = self.build(params)
        out = []
        for target in self.targets:
            cut = array_pattern(geom, model, target.code, self.ranges.frequency, self.grid)
            summary = beam_summary(cut, self.ranges.detect_threshold_db)
            out.append(score_target(target, summary, self.ranges.penalty_deg2, self.ranges.max_residual_deg))
        return out

    def cost(self, params):
        """(missed targets, pointing cost); tuples compare lexicographically."""
        self.evaluations += 1
        try:
            residuals = self.residuals(params)
        except ValueError:
            return (len(self.targets) + 1, math.inf)
        missed = sum(1 for r in residuals if not r.passed)
        return (missed, round(sum(r.cost for r in residuals), COST_DECIMALS))


def _candidates(ranges, d_values, eps_values, chi_values, rho_values):
    for d, rho, chi in itertools.product(d_values, rho_values, chi_values):
        if ranges.anchored:
            yield (ranges.anchored_eps(d), float(d), float(rho), float(chi))
        else:
            for eps in eps_values:
                yield (float(eps), float(d), float(rho), float(chi))


def _best(objective, candidates, incumbent=None):
    scored = [(objective.cost(p), p) for p in candidates]
    if incumbent is not None:
        scored.append(incumbent)
    return min(scored)


def _refined_axis(center, step, spec):
    lo, hi, _ = spec
    if step == 0:
        return [center]
    values = np.clip(np.linspace(center - step, center + step, REFINE_POINTS), lo, hi)
    return sorted(set(float(v) for v in values) | {center})


def calibrate(targets, search_ranges=None, base_geometry=None, base_model=None):
    """
    Fit guide and element parameters to observed lobe directions.

    Grid search over the box in `search_ranges`, then `refine_levels`
    local passes around the incumbent with the step halved each time.

    :param targets: CalibrationTarget list (codes with their expected lobes).
    :param search_ranges: SearchRanges; defaults cover 0.2 to 0.8 free-space wavelengths.
    :param base_geometry: Geometry supplying n_elements and feed_h0.
    :param base_model: ElementModel supplying the resonance parameters.
    :return: (GuideGeometry, ElementModel, FitReport)
    """
    targets = list(targets)
    if not targets:
        raise CalibrationError("calibrate needs at least one target")
    ranges = search_ranges or SearchRanges()
    base_geometry = base_geometry or GuideGeometry()
    base_model = base_model or ElementModel()
    for target in targets:
        if len(target.code) != base_geometry.n_elements:
            raise CalibrationError(
                f"Target {target.name or target.code} has {len(target.code)} bits, "
                f"geometry has {base_geometry.n_elements} elements")

    objective = _Objective(targets, ranges, base_geometry, base_model)
    d_values = _axis(ranges.spacing_d)
    chi_values = _axis(ranges.off_state_phase_rad)
    eps_values = None if ranges.anchored else _axis(ranges.eps_eff)
    logging.info(f"Calibrating against {len(targets)} targets "
                 f"({'anchored' if ranges.anchored else 'free'} eps_eff)")

    best = _best(objective, _candidates(ranges, d_values, eps_values, chi_values, ranges.off_leakage_rho))
    logging.info(f"Grid search best: {best[0][0]} missed targets, cost {best[0][1]:.3f} "
                 f"after {objective.evaluations} evaluations")

    d_step = _step(ranges.spacing_d)
    chi_step = _step(ranges.off_state_phase_rad)
    eps_step = 0.0 if ranges.anchored else _step(ranges.eps_eff)
    for level in range(ranges.refine_levels):
        if not math.isfinite(best[0][1]):
            break
        eps, d, rho, chi = best[1]
        d_axis = _refined_axis(d, d_step, ranges.spacing_d)
        chi_axis = _refined_axis(chi, chi_step, ranges.off_state_phase_rad)
        eps_axis = None if ranges.anchored else _refined_axis(eps, eps_step, ranges.eps_eff)
        best = _best(objective, _candidates(ranges, d_axis, eps_axis, chi_axis, (rho,)), incumbent=best)
        d_step, chi_step, eps_step = d_step / 2, chi_step / 2, eps_step / 2
        logging.info(f"Refinement level {level + 1}: {best[0][0]} missed, cost {best[0][1]:.4f}")

    (_, cost), params = best
    if not math.isfinite(cost):
        raise CalibrationError("No parameter set in the search box produced a valid model")
    geom, model = objective.build(params)
    report = FitReport(
        cost=cost,
        parameters={
            'eps_eff': params[0],
            'spacing_d': params[1],
            'off_leakage_rho': params[2],
            'off_state_phase_rad': params[3],
        },
        residuals=tuple(objective.residuals(params)),
        evaluations=objective.evaluations,
    )
    return geom, model, report
