# utils/__init__.py

from .logging_config import configure_logging
from .seeding import (
    check_seed,
    point_rng,
    STREAM_ANGLE_SWEEP,
    STREAM_LINK_POINT,
    STREAM_PAYLOAD,
    STREAM_SNR_POINT,
)

__all__ = [
    'configure_logging',
    'check_seed',
    'point_rng',
    'STREAM_ANGLE_SWEEP',
    'STREAM_LINK_POINT',
    'STREAM_PAYLOAD',
    'STREAM_SNR_POINT',
]
