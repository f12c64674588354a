# antenna/__init__.py

from .element import ElementModel, ElementModelError, polarizability, effective_weight
from .geometry import (
    CodeWord,
    CodeWordError,
    GeometryError,
    GuideGeometry,
    reference_wave,
)
from .pattern import (
    PatternCut,
    PatternError,
    array_pattern,
    azimuth_grid,
    code_fields,
)
from .beams import BeamSummary, Lobe, beam_summary, DEFAULT_THRESHOLD_DB
from .calibration import (
    REFERENCE_BEAMS,
    CalibrationError,
    CalibrationTarget,
    FitReport,
    ReferenceBeam,
    SearchRanges,
    TargetResidual,
    calibrate,
    reference_targets,
    score_target,
)

__all__ = [
    'ElementModel', 'ElementModelError', 'polarizability', 'effective_weight',
    'CodeWord', 'CodeWordError', 'GeometryError', 'GuideGeometry', 'reference_wave',
    'PatternCut', 'PatternError', 'array_pattern', 'azimuth_grid', 'code_fields',
    'BeamSummary', 'Lobe', 'beam_summary', 'DEFAULT_THRESHOLD_DB',
    'REFERENCE_BEAMS', 'CalibrationError', 'CalibrationTarget', 'FitReport', 'ReferenceBeam',
    'SearchRanges', 'TargetResidual', 'calibrate', 'reference_targets', 'score_target',
]
