# codebook/reference.py

from dataclasses import dataclass
import logging

import numpy as np

from antenna import REFERENCE_BEAMS, DEFAULT_THRESHOLD_DB, array_pattern, azimuth_grid, beam_summary
from antenna.calibration import BROADSIDE_SIGN_DEG, match_lobes


@dataclass(frozen=True)
class ReferenceCheck:
    name: str
    code: object
    expected_lobes: tuple
    found_lobes: tuple
    mld_residuals: tuple
    count_match: bool
    sign_match: bool
    expected_gains_dbi: tuple = ()
    found_gains_dbi: tuple = ()

    @property
    def passed(self):
        return self.count_match and self.sign_match


def check_reference(reference, summary):
    """Compare a beam summary with one reference row."""
    found = summary.lobe_directions
    matched = match_lobes(reference.lobes_deg, found)
    residuals = tuple(None if m is None else m - e for m, e in zip(matched, reference.lobes_deg))
    sign_match = all(
        m is not None and (abs(e) < BROADSIDE_SIGN_DEG or np.sign(m) == np.sign(e))
        for m, e in zip(matched, reference.lobes_deg)
    )
    return ReferenceCheck(
        name=reference.name,
        code=reference.code,
        expected_lobes=reference.lobes_deg,
        found_lobes=found,
        mld_residuals=residuals,
        count_match=summary.n_beams == len(reference.lobes_deg),
        sign_match=bool(sign_match),
        expected_gains_dbi=reference.gains_dbi,
        found_gains_dbi=tuple(lobe.peak_dbi for lobe in summary.lobes),
    )


def verify_reference_codes(geom, model, frequency, grid=None, detect_threshold_db=DEFAULT_THRESHOLD_DB):
    """Check the model against every reference code (lobe count, lobe sign, pointing residual)."""
    grid = azimuth_grid(0.25) if grid is None else grid
    checks = []
    for reference in REFERENCE_BEAMS:
        cut = array_pattern(geom, model, reference.code, frequency, grid)
        check = check_reference(reference, beam_summary(cut, detect_threshold_db))
        level = logging.INFO if check.passed else logging.WARNING
        logging.log(level, f"{reference.name} {reference.code}: expected {reference.lobes_deg}, "
                           f"found {tuple(round(a, 2) for a in check.found_lobes)}")
        checks.append(check)
    return tuple(checks)
