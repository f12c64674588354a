# codebook/__init__.py

from .metrics import (
    BeamSpec,
    CodebookError,
    CodeMetrics,
    enumerate_metrics,
    evaluate_code,
    MAX_ENUMERATION_BITS,
)
from .synthesis import synthesize, rank_key
from .reference import ReferenceCheck, check_reference, verify_reference_codes
from .security import HopSet, directional_hop_set

__all__ = [
    'BeamSpec',
    'CodebookError',
    'CodeMetrics',
    'enumerate_metrics',
    'evaluate_code',
    'MAX_ENUMERATION_BITS',
    'synthesize',
    'rank_key',
    'ReferenceCheck',
    'check_reference',
    'verify_reference_codes',
    'HopSet',
    'directional_hop_set',
]
