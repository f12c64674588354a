# data/exporters.py

import csv
from dataclasses import dataclass
import io
import json
import logging
import math
import os
import time

import aiofiles

LIST_SEPARATOR = ';'


class ExportError(ValueError):
    pass


# ==============================
# Cell formatting
# ==============================

def format_value(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (list, tuple)):
        return LIST_SEPARATOR.join(format_value(v) for v in value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return format(value, '.12g')
    try:
        return format_value(value.item())
    except AttributeError:
        return str(value)


def parse_float(text):
    return float(text)


def parse_optional_float(text):
    return None if text == '' else float(text)


def parse_float_list(text):
    return () if text == '' else tuple(float(v) for v in text.split(LIST_SEPARATOR))


def parse_optional_float_list(text):
    return () if text == '' else tuple(None if v == '' else float(v) for v in text.split(LIST_SEPARATOR))


def parse_bool(text):
    if text not in ('true', 'false'):
        raise ValueError(f"Not a boolean: {text!r}")
    return text == 'true'


def parse_optional_bool(text):
    return None if text == '' else parse_bool(text)


def parse_hex(text):
    return int(text, 16)


@dataclass(frozen=True)
class CsvSchema:
    """Column names with the parser that reads each one back."""
    name: str
    columns: tuple

    @property
    def header(self):
        return [name for name, _ in self.columns]

    def parse_row(self, row):
        if len(row) != len(self.columns):
            raise ExportError(f"{self.name}: expected {len(self.columns)} columns, got {len(row)}")
        try:
            return {name: parse(cell) for (name, parse), cell in zip(self.columns, row)}
        except ValueError as e:
            raise ExportError(f"{self.name}: {e}") from e


PATTERN_SCHEMA = CsvSchema('pattern', (
    ('angle_deg', parse_float), ('re', parse_float), ('im', parse_float), ('dbi', parse_float),
))
METRICS_SCHEMA = CsvSchema('metrics', (
    ('code_hex', parse_hex), ('n_beams', int), ('mld_list', parse_float_list),
    ('peak_dbi', parse_optional_float), ('hpbw_list', parse_optional_float_list),
    ('sll_db', parse_optional_float), ('feasible', parse_optional_bool),
))
RANKED_SCHEMA = CsvSchema('ranked', (
    ('rank', int), ('code_hex', parse_hex), ('match_error_deg', parse_float), ('n_beams', int),
    ('mld_list', parse_float_list), ('peak_dbi', parse_optional_float),
    ('hpbw_list', parse_optional_float_list), ('sll_db', parse_optional_float),
))
LINK_SCHEMA = CsvSchema('link_report', (
    ('index', int), ('angle_deg', parse_float), ('snr_db', parse_float), ('rx_power_dbm', parse_float),
    ('prefec_ber', parse_float), ('postfec_ber', parse_float), ('evm_pct', parse_float),
    ('throughput_bps', parse_float), ('recovered', parse_bool), ('uncorrectable_blocks', int),
))
SWEEP_SCHEMA = CsvSchema('sweep', (
    ('angle_deg', parse_float), ('snr_db', parse_float), ('prefec_ber', parse_float),
    ('postfec_ber', parse_float), ('evm_pct', parse_float), ('recovered', parse_bool),
))
TIMELINE_SCHEMA = CsvSchema('timeline', (
    ('tick', int), ('radiation_word_hex', parse_hex),
))
EVENTS_SCHEMA = CsvSchema('events', (
    ('tick', int), ('event', str), ('radiation_word_hex', parse_hex), ('detail', str),
))
RESIDUALS_SCHEMA = CsvSchema('residuals', (
    ('target', str), ('code_hex', parse_hex), ('expected_lobes', parse_float_list),
    ('fitted_lobes', parse_float_list), ('mld_errors', parse_optional_float_list),
    ('n_expected', int), ('n_found', int), ('sign_match', parse_bool), ('max_abs_error', parse_float),
))


# ==============================
# Row builders
# ==============================

def word_hex(word, n_bits=16):
    return f"0x{word:0{(n_bits + 3) // 4}X}"


def pattern_rows(cut):
    for angle, value, dbi in zip(cut.azimuth_grid, cut.complex_field, cut.directivity_dbi):
        yield (float(angle), float(value.real), float(value.imag), float(dbi))


def summary_row(code, summary, feasible=None):
    return (code.to_hex(), summary.n_beams, summary.lobe_directions, summary.peak_dbi,
            summary.lobe_widths, summary.sll_db, feasible)


def metrics_row(metrics):
    return summary_row(metrics.code, metrics.summary, metrics.feasible)


def ranked_rows(ranked):
    for rank, item in enumerate(ranked, start=1):
        s = item.summary
        yield (rank, item.code.to_hex(), item.match_error_deg, s.n_beams, s.lobe_directions,
               s.peak_dbi, s.lobe_widths, s.sll_db)


def link_row(index, report):
    return (index, report.angle_deg, report.snr_db, report.rx_power_dbm, report.prefec_ber,
            report.postfec_ber, report.evm_pct, report.throughput_bps, report.payload_recovered,
            report.uncorrectable_blocks)


def sweep_row(report):
    return (report.angle_deg, report.snr_db, report.prefec_ber, report.postfec_ber,
            report.evm_pct, report.payload_recovered)


def timeline_rows(timeline, n_bits=16):
    for tick, word in timeline:
        yield (tick, word_hex(word, n_bits))


def event_rows(events, n_bits=16):
    for event in events:
        yield (event.tick, event.kind, word_hex(event.radiation_word, n_bits), event.detail)


def residual_row(residual):
    return (residual.name, residual.code.to_hex(), residual.expected_lobes, residual.fitted_lobes,
            residual.mld_errors, residual.n_expected, residual.n_found, residual.sign_match,
            residual.max_abs_error)


# ==============================
# File I/O
# ==============================

def csv_text(schema, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(schema.header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


async def write_csv(path, schema, rows):
    """Write `rows` under the schema header; returns the path."""
    text = csv_text(schema, rows)
    async with aiofiles.open(path, 'w', encoding='utf-8', newline='') as file:
        await file.write(text)
    logging.info(f"Wrote {schema.name} table to {path}")
    return path


async def read_csv(path, schema):
    """Read a table written by write_csv back into typed dictionaries."""
    async with aiofiles.open(path, 'r', encoding='utf-8', newline='') as file:
        text = await file.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != schema.header:
        raise ExportError(f"{path}: header {header} does not match {schema.name} schema {schema.header}")
    return [schema.parse_row(row) for row in reader]


async def write_json(path, data):
    async with aiofiles.open(path, 'w', encoding='utf-8') as file:
        await file.write(json.dumps(data, indent=4, sort_keys=True))
    logging.info(f"Wrote {path}")
    return path


async def read_json(path):
    async with aiofiles.open(path, 'r', encoding='utf-8') as file:
        return json.loads(await file.read())


async def write_bytes(path, data):
    async with aiofiles.open(path, 'wb') as file:
        await file.write(data)
    logging.debug(f"Wrote {len(data)} bytes to {path}")
    return path


async def read_bytes(path):
    async with aiofiles.open(path, 'rb') as file:
        return await file.read()


async def backup_file_async(file_path):
    """Asynchronously create a backup of the specified file."""
    if not os.path.isfile(file_path):
        return None
    backup_path = f"{file_path}.backup.{int(time.time())}"
    try:
        async with aiofiles.open(file_path, 'rb') as src, aiofiles.open(backup_path, 'wb') as dst:
            await dst.write(await src.read())
        logging.info(f"Created backup of {file_path} at {backup_path}")
        return backup_path
    except OSError as e:
        logging.error(f"Failed to create backup for {file_path}: {e}")
        return None
