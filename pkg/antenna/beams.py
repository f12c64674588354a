# antenna/beams.py

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .pattern import PatternError

DEFAULT_THRESHOLD_DB = -10.0
HALF_POWER_DB = 3.0
# Stand-in for -inf dBi so peak search and interpolation stay finite
FLOOR_DBI = -400.0


@dataclass(frozen=True)
class Lobe:
    direction_deg: float
    peak_dbi: float
    hpbw_deg: float | None


@dataclass(frozen=True)
class BeamSummary:
    """
    Lobe statistics of one pattern cut.

    Lobe fields are None for a null pattern; sll_db is None when every local
    maximum counts as a beam.
    """
    n_beams: int
    mld_deg: float | None = None
    peak_dbi: float | None = None
    hpbw_deg: float | None = None
    sll_db: float | None = None
    lobes: tuple = ()

    @property
    def lobe_directions(self):
        return tuple(lobe.direction_deg for lobe in self.lobes)

    @property
    def lobe_widths(self):
        return tuple(lobe.hpbw_deg for lobe in self.lobes)


def _refined_direction(angles, dbi, i):
    # Three-point parabola through the dB samples around a strict maximum
    if i <= 0 or i >= len(angles) - 1:
        return float(angles[i])
    y0, y1, y2 = dbi[i - 1], dbi[i], dbi[i + 1]
    if not (y1 > y0 and y1 > y2):
        return float(angles[i])
    offset = 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2)
    offset = min(max(offset, -0.5), 0.5)
    if offset >= 0:
        return float(angles[i] + offset * (angles[i + 1] - angles[i]))
    return float(angles[i] + offset * (angles[i] - angles[i - 1]))


def _crossing(angles, dbi, lo, hi, level):
    # Angle where the linear segment between samples lo and hi meets `level`
    y_lo, y_hi = dbi[lo], dbi[hi]
    if y_hi == y_lo:
        return float(angles[lo])
    return float(angles[lo] + (level - y_lo) / (y_hi - y_lo) * (angles[hi] - angles[lo]))


def half_power_width(angles, dbi, i):
    """-3 dB width of the lobe peaking at sample `i`; truncated at the grid edges."""
    level = dbi[i] - HALF_POWER_DB
    below_left = np.nonzero(dbi[:i] < level)[0]
    below_right = np.nonzero(dbi[i + 1:] < level)[0]
    if below_left.size:
        j = int(below_left[-1])
        left = _crossing(angles, dbi, j, j + 1, level)
    else:
        left = float(angles[0])
    if below_right.size:
        k = int(below_right[0]) + i + 1
        right = _crossing(angles, dbi, k - 1, k, level)
    else:
        right = float(angles[-1])
    width = right - left
    return width if width > 0 else None


def beam_summary(cut, detect_threshold_db=DEFAULT_THRESHOLD_DB):
    """
    Detect lobes in a pattern cut.

    Local maxima within `detect_threshold_db` of the global peak count as
    beams; the highest remaining local maximum sets the sidelobe level.

    :param cut: PatternCut with directivity populated.
    :param detect_threshold_db: Negative detection threshold relative to the peak.
    """
    if not detect_threshold_db < 0:
        raise PatternError(f"Detection threshold must be negative, got {detect_threshold_db}")
    if not cut.normalizable:
        return BeamSummary(n_beams=0)

    angles = cut.azimuth_grid
    dbi = np.maximum(cut.directivity_dbi, FLOOR_DBI)
    padded = np.concatenate(([FLOOR_DBI - 1.0], dbi, [FLOOR_DBI - 1.0]))
    peaks, _ = find_peaks(padded)
    peaks = peaks - 1
    if peaks.size == 0:
        return BeamSummary(n_beams=0)

    heights = dbi[peaks]
    main = int(peaks[int(np.argmax(heights))])
    global_peak = float(dbi[main])
    is_beam = heights >= global_peak + detect_threshold_db

    lobes = []
    main_lobe = None
    for i in peaks[is_beam]:
        i = int(i)
        lobe = Lobe(
            direction_deg=_refined_direction(angles, dbi, i),
            peak_dbi=float(dbi[i]),
            hpbw_deg=half_power_width(angles, dbi, i),
        )
        lobes.append(lobe)
        if i == main:
            main_lobe = lobe

    sidelobes = heights[~is_beam]
    sll = float(sidelobes.max() - global_peak) if sidelobes.size else None
    return BeamSummary(
        n_beams=len(lobes),
        mld_deg=main_lobe.direction_deg,
        peak_dbi=global_peak,
        hpbw_deg=main_lobe.hpbw_deg,
        sll_db=sll,
        lobes=tuple(lobes),
    )
