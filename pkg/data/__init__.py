# data/__init__.py

from .exporters import (
    ExportError,
    CsvSchema,
    PATTERN_SCHEMA,
    METRICS_SCHEMA,
    RANKED_SCHEMA,
    LINK_SCHEMA,
    SWEEP_SCHEMA,
    TIMELINE_SCHEMA,
    EVENTS_SCHEMA,
    RESIDUALS_SCHEMA,
    backup_file_async,
    csv_text,
    event_rows,
    format_value,
    link_row,
    metrics_row,
    pattern_rows,
    ranked_rows,
    read_bytes,
    read_csv,
    read_json,
    residual_row,
    summary_row,
    sweep_row,
    timeline_rows,
    word_hex,
    write_bytes,
    write_csv,
    write_json,
)
from .manifest import MANIFEST_NAME, RunManifest, load_manifest, sha256_file, verify_manifest, write_manifest

__all__ = [
    'ExportError', 'CsvSchema',
    'PATTERN_SCHEMA', 'METRICS_SCHEMA', 'RANKED_SCHEMA', 'LINK_SCHEMA', 'SWEEP_SCHEMA',
    'TIMELINE_SCHEMA', 'EVENTS_SCHEMA', 'RESIDUALS_SCHEMA',
    'backup_file_async', 'csv_text', 'event_rows', 'format_value', 'link_row', 'metrics_row',
    'pattern_rows', 'ranked_rows', 'read_bytes', 'read_csv', 'read_json', 'residual_row',
    'summary_row', 'sweep_row', 'timeline_rows', 'word_hex', 'write_bytes', 'write_csv', 'write_json',
    'MANIFEST_NAME', 'RunManifest', 'load_manifest', 'sha256_file', 'verify_manifest', 'write_manifest',
]
