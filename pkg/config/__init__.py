# config/__init__.py

from .config import (
    SETTINGS_FILE,
    ConfigError,
    ExperimentConfig,
    CalibrationSettings,
    HopSettings,
    create_default_settings,
    load_settings,
    save_settings,
    merge_settings,
    parse_codes,
    parse_targets,
    resolve_experiment,
)

__all__ = [
    'SETTINGS_FILE',
    'ConfigError',
    'ExperimentConfig',
    'CalibrationSettings',
    'HopSettings',
    'create_default_settings',
    'load_settings',
    'save_settings',
    'merge_settings',
    'parse_codes',
    'parse_targets',
    'resolve_experiment',
]
