# codebook/synthesis.py

import logging

from antenna import DEFAULT_THRESHOLD_DB
from .metrics import CodeMetrics, enumerate_metrics


def rank_key(metrics):
    return (metrics.match_error_deg, -metrics.summary.peak_dbi, metrics.code_int)


def synthesize(spec, geom, model, frequency, grid, metrics=None,
               detect_threshold_db=DEFAULT_THRESHOLD_DB, workers=1):
    """
    Feasible codes for `spec`, best first.

    Ranked by total lobe pointing error, then by higher peak directivity,
    then by integer code value.

    :param metrics: Optional iterable of already computed CodeMetrics; the
        full enumeration runs when omitted.
    """
    if metrics is None:
        metrics = enumerate_metrics(geom, model, frequency, grid, spec, detect_threshold_db, workers)
    feasible = []
    for item in metrics:
        error = spec.match_error(item.summary)
        if error is not None:
            feasible.append(CodeMetrics(item.code, item.summary, feasible=True, match_error_deg=error))
    feasible.sort(key=rank_key)
    logging.info(f"Synthesis found {len(feasible)} feasible codes")
    return feasible
