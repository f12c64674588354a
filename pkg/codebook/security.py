# codebook/security.py

from dataclasses import dataclass
import logging

import numpy as np

from antenna import CodeWord, azimuth_grid, code_fields
from .metrics import CodebookError, MAX_ENUMERATION_BITS

DEFAULT_TOLERANCE = 0.35
DEFAULT_MAX_CODES = 16
CHUNK = 4096
# Quantile of the relative field change over unprotected directions used as the score
SCRAMBLE_QUANTILE = 0.25


@dataclass(frozen=True)
class HopSet:
    """
    Codes that look alike from the protected directions.

    codes[0] is the reference code. max_deviation is the worst relative
    distance of any member's field from the set mean at a protected angle.
    """
    codes: tuple
    protect_deg: tuple
    max_deviation: float
    scrambling: tuple

    def __len__(self):
        return len(self.codes)


def _code_bits(values, n_bits):
    shifts = np.arange(n_bits - 1, -1, -1, dtype=np.int64)
    return ((values[:, np.newaxis] >> shifts) & 1).astype(np.uint8)


def _deviation(fields):
    mean = fields.mean(axis=0)
    return float(np.max(np.abs(fields / mean - 1.0)))


def directional_hop_set(geom, model, frequency, reference, protect_deg,
                        tolerance=DEFAULT_TOLERANCE, max_codes=DEFAULT_MAX_CODES,
                        guard_deg=5.0, grid_step_deg=1.0):
    """
    Select codes to cycle through so that only the protected directions see a steady channel.

    Every code of the row is screened: it must keep the complex far field at
    each protected angle within `tolerance` (relative) of the reference. The
    survivors are ranked by how much they change the field over the
    unprotected directions and added greedily while the whole set stays
    within `tolerance` of its own mean at the protected angles.

    :param reference: CodeWord whose lobes are being protected.
    :param protect_deg: Receiver directions that must keep a steady channel.
    :param guard_deg: Half width around each protected angle left out of the score.
    :return: HopSet with the reference first.
    """
    n_bits = geom.n_elements
    if n_bits > MAX_ENUMERATION_BITS:
        raise CodebookError(f"Hop set search limited to {MAX_ENUMERATION_BITS} elements")
    if not 0 < tolerance < 1:
        raise CodebookError(f"tolerance must lie in (0, 1), got {tolerance}")
    if max_codes < 1:
        raise CodebookError("max_codes must be at least 1")
    protect = np.array(sorted(set(float(a) for a in protect_deg)))
    if protect.size == 0:
        raise CodebookError("At least one protected direction is required")

    grid = azimuth_grid(grid_step_deg)
    exposed = grid[(np.abs(grid) < 90.0)
                   & np.all(np.abs(grid[:, np.newaxis] - protect[np.newaxis, :]) > guard_deg, axis=1)]
    if exposed.size == 0:
        raise CodebookError("No unprotected directions left to score")

    ref_bits = reference.as_array()[np.newaxis, :]
    ref_protect = code_fields(geom, model, ref_bits, frequency, protect)[0]
    ref_exposed = code_fields(geom, model, ref_bits, frequency, exposed)[0]
    if np.any(np.abs(ref_protect) == 0):
        raise CodebookError("Reference code does not radiate towards every protected direction")
    ref_value = reference.to_int()
    exposed_scale = np.maximum(np.abs(ref_exposed), 1e-12)

    candidates = []
    total = 1 << n_bits
    for start in range(0, total, CHUNK):
        values = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        bits = _code_bits(values, n_bits)
        near = code_fields(geom, model, bits, frequency, protect)
        steady = np.all(np.abs(near / ref_protect - 1.0) <= tolerance, axis=1)
        steady &= values != ref_value
        if not np.any(steady):
            continue
        far = code_fields(geom, model, bits[steady], frequency, exposed)
        change = np.abs(far - ref_exposed) / exposed_scale
        scores = np.quantile(change, SCRAMBLE_QUANTILE, axis=1)
        for value, score, field in zip(values[steady], scores, near[steady]):
            candidates.append((-float(score), int(value), field))
    candidates.sort(key=lambda item: (item[0], item[1]))
    logging.info(f"{len(candidates)} codes keep the protected field within {tolerance:.0%}")

    members = [reference]
    fields = [ref_protect]
    scores = [0.0]
    for neg_score, value, field in candidates:
        if len(members) >= max_codes:
            break
        trial = np.vstack(fields + [field])
        if _deviation(trial) <= tolerance:
            members.append(CodeWord.from_int(value, n_bits))
            fields.append(field)
            scores.append(-neg_score)
    deviation = _deviation(np.vstack(fields))
    logging.info(f"Hop set of {len(members)} codes, worst protected deviation {deviation:.3f}")
    return HopSet(codes=tuple(members), protect_deg=tuple(protect), max_deviation=deviation,
                  scrambling=tuple(scores))
