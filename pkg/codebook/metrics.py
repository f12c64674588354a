# codebook/metrics.py

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import logging
import math

from antenna import CodeWord, array_pattern, beam_summary, DEFAULT_THRESHOLD_DB

MAX_ENUMERATION_BITS = 24
PROGRESS_EVERY = 4096
SHARD_SIZE = 4096


class CodebookError(ValueError):
    pass


@dataclass(frozen=True)
class BeamSpec:
    """
    Requested beam layout.

    :param targets: (direction_deg, tolerance_deg) pairs, one per wanted lobe.
    :param required_beams: Exact number of detected beams.
    :param max_sll_db: Ceiling on the sidelobe level relative to the peak.
    :param min_peak_dbi: Floor on the peak directivity.
    """
    targets: tuple
    required_beams: int
    max_sll_db: float = 0.0
    min_peak_dbi: float = -math.inf

    def __post_init__(self):
        targets = tuple((float(direction), float(tol)) for direction, tol in self.targets)
        if not targets:
            raise CodebookError("BeamSpec needs at least one target direction")
        if any(not tol > 0 for _, tol in targets):
            raise CodebookError("Target tolerances must be positive")
        if any(abs(direction) > 90 for direction, _ in targets):
            raise CodebookError("Target directions must lie within [-90, 90] degrees")
        if self.required_beams < 1:
            raise CodebookError(f"required_beams must be at least 1, got {self.required_beams}")
        if self.max_sll_db > 0:
            raise CodebookError(f"max_sll_db must not be positive, got {self.max_sll_db}")
        object.__setattr__(self, 'targets', targets)

    def match_error(self, summary):
        """
        Sum of |lobe - target| over matched lobes, or None if `summary` is not admitted.

        Each target takes a distinct lobe, closest pairs first.
        """
        if summary.n_beams != self.required_beams:
            return None
        if summary.sll_db is not None and summary.sll_db > self.max_sll_db:
            return None
        if summary.peak_dbi is None or summary.peak_dbi < self.min_peak_dbi:
            return None
        pairs = sorted(
            (abs(lobe - direction), t, l)
            for t, (direction, _) in enumerate(self.targets)
            for l, lobe in enumerate(summary.lobe_directions)
        )
        used_targets, used_lobes, total = set(), set(), 0.0
        for delta, t, l in pairs:
            if t in used_targets or l in used_lobes:
                continue
            if delta > self.targets[t][1]:
                continue
            used_targets.add(t)
            used_lobes.add(l)
            total += delta
        if len(used_targets) != len(self.targets):
            return None
        return total

    def admits(self, summary):
        return self.match_error(summary) is not None


@dataclass(frozen=True)
class CodeMetrics:
    code: CodeWord
    summary: object
    feasible: bool | None = None
    match_error_deg: float | None = None

    @property
    def code_int(self):
        return self.code.to_int()


def evaluate_code(value, geom, model, frequency, grid, spec=None, detect_threshold_db=DEFAULT_THRESHOLD_DB):
    """Metrics of the code with integer value `value` (feasibility only when `spec` is given)."""
    code = CodeWord.from_int(value, geom.n_elements)
    summary = beam_summary(array_pattern(geom, model, code, frequency, grid), detect_threshold_db)
    if spec is None:
        return CodeMetrics(code, summary)
    error = spec.match_error(summary)
    return CodeMetrics(code, summary, feasible=error is not None, match_error_deg=error)


def _evaluate_shard(start, stop, geom, model, frequency, grid, spec, detect_threshold_db):
    return [evaluate_code(v, geom, model, frequency, grid, spec, detect_threshold_db)
            for v in range(start, stop)]


def enumerate_metrics(geom, model, frequency, grid, spec=None,
                      detect_threshold_db=DEFAULT_THRESHOLD_DB, workers=1):
    """
    Yield CodeMetrics for every code of the row in ascending integer order.

    With workers > 1 disjoint code ranges are evaluated in a process pool;
    the output order and values do not depend on the worker count.
    """
    n_bits = geom.n_elements
    if n_bits > MAX_ENUMERATION_BITS:
        raise CodebookError(f"Enumeration limited to {MAX_ENUMERATION_BITS} elements, got {n_bits}")
    total = 1 << n_bits
    logging.info(f"Enumerating {total} codes ({workers} worker(s))")

    if workers <= 1 or total <= SHARD_SIZE:
        for value in range(total):
            yield evaluate_code(value, geom, model, frequency, grid, spec, detect_threshold_db)
            if (value + 1) % PROGRESS_EVERY == 0:
                logging.info(f"Evaluated {value + 1}/{total} codes")
        return

    starts = list(range(0, total, SHARD_SIZE))
    stops = [min(s + SHARD_SIZE, total) for s in starts]
    count = len(starts)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        shards = pool.map(_evaluate_shard, starts, stops, [geom] * count, [model] * count,
                          [frequency] * count, [grid] * count, [spec] * count,
                          [detect_threshold_db] * count)
        for stop, shard in zip(stops, shards):
            yield from shard
            logging.info(f"Evaluated {stop}/{total} codes")
