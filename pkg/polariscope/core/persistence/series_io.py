"""
Detuning series CSV files
"""

import csv
import io
from pathlib import Path
from typing import List, Optional, Sequence, Union

from ..analysis.dispersion import DetuningRecord, DetuningSeries
from ..errors import CsvParseError, SpectrumIOError
from .spectrum_io import write_text_file

SERIES_COLUMNS = ("detuning_ev", "e_upper_ev", "e_lower_ev")
STRENGTH_COLUMNS = ("sigma_u", "sigma_l")


def _cell(row: List[str], index: int) -> str:
    return row[index].strip() if index < len(row) else ""


def _number(text: str, source: str, row: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise CsvParseError(source, row, f"{column} {text!r} is not a number")


def _optional(text: str, source: str, row: int, column: str) -> Optional[float]:
    return None if text == "" else _number(text, source, row, column)


def parse_series_csv(text: str, source: str = "<string>") -> DetuningSeries:
    """
    Parse series CSV text. The strength columns are optional; a row may leave
    both of them empty.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    names = tuple(h.strip().lower() for h in header or [])
    if names[:3] != SERIES_COLUMNS:
        raise CsvParseError(source, 1, f"expected header {','.join(SERIES_COLUMNS)}")
    if names[3:] not in ((), STRENGTH_COLUMNS):
        raise CsvParseError(source, 1, f"unexpected columns {','.join(names[3:])}")
    with_strengths = len(names) == 5

    records = []
    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) > len(names) or len(row) < 3:
            raise CsvParseError(
                source, row_number, f"expected {len(names)} columns, got {len(row)}"
            )
        detuning, upper, lower = (
            _number(_cell(row, i), source, row_number, SERIES_COLUMNS[i])
            for i in range(3)
        )
        sigma_u = sigma_l = None
        if with_strengths:
            sigma_u = _optional(_cell(row, 3), source, row_number, "sigma_u")
            sigma_l = _optional(_cell(row, 4), source, row_number, "sigma_l")
        try:
            records.append(
                DetuningRecord(
                    detuning, upper, lower, sigma_u, sigma_l, label=f"row {row_number}"
                )
            )
        except ValueError as e:
            raise CsvParseError(source, row_number, str(e))
    try:
        return DetuningSeries(tuple(records))
    except ValueError as e:
        raise CsvParseError(source, len(records) + 1, str(e))


def read_series_csv(path: Union[str, Path]) -> DetuningSeries:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpectrumIOError(f"cannot read {path}: {e}")
    return parse_series_csv(text, str(path))


def format_series_csv(series: DetuningSeries) -> str:
    """Series CSV text; strength columns only when every record has them"""
    with_strengths = series.has_strengths
    columns = SERIES_COLUMNS + (STRENGTH_COLUMNS if with_strengths else ())
    lines = [",".join(columns)]
    for r in series:
        values = [r.detuning, r.e_upper, r.e_lower]
        if with_strengths:
            values += [r.sigma_u, r.sigma_l]
        lines.append(",".join(f"{v:.17g}" for v in values))
    return "\n".join(lines) + "\n"


def write_series_csv(series: DetuningSeries, path: Union[str, Path]) -> None:
    write_text_file(path, format_series_csv(series))


CONCENTRATION_COLUMNS = ("concentration_mm", "e_upper_ev", "e_lower_ev", "splitting_ev")


def format_concentration_csv(
    concentrations: Sequence[float],
    uppers: Sequence[float],
    lowers: Sequence[float],
) -> str:
    """Branch energies of a concentration sweep, one row per concentration"""
    lines = [",".join(CONCENTRATION_COLUMNS)]
    for c, upper, lower in zip(concentrations, uppers, lowers):
        lines.append(",".join(f"{v:.17g}" for v in (c, upper, lower, upper - lower)))
    return "\n".join(lines) + "\n"
