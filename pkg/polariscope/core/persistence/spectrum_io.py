"""
Spectrum CSV files and normalization of raw counts against a reference
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..errors import (
    AlignmentError,
    BadReferenceError,
    CsvParseError,
    GridOrderError,
    SpectrumIOError,
)
from ..optics.spectrum import BOUND_SLACK, Channel, Spectrum

logger = logging.getLogger(__name__)

SPECTRUM_HEADER = ("energy_ev", "value")
NORMALIZED_CEILING = 1.2
REFERENCE_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class RawMeasurement:
    """Detector counts on a strictly increasing energy grid"""

    energies: np.ndarray
    counts: np.ndarray
    sample_id: str = ""
    channel: Channel = Channel.RAW

    def __post_init__(self):
        energies = np.array(self.energies, dtype=float).reshape(-1)
        counts = np.array(self.counts, dtype=float).reshape(-1)
        if energies.shape != counts.shape:
            raise ValueError("energies and counts differ in length")
        if energies.size > 1 and np.any(np.diff(energies) <= 0):
            raise GridOrderError(
                f"{self.sample_id or 'measurement'}: grid not increasing"
            )
        if np.any(counts < -BOUND_SLACK):
            raise ValueError("counts must be >= 0")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "counts", counts)

    def __len__(self) -> int:
        return int(self.energies.size)

    def to_spectrum(self, channel: Optional[Channel] = None) -> Spectrum:
        return Spectrum(self.energies, self.counts, channel or self.channel)


@dataclass(frozen=True, eq=False)
class NormalizedSpectrum:
    """Sample / reference ratio and the indices that were clipped"""

    spectrum: Spectrum
    flagged: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))


def normalize(sample: RawMeasurement, reference: RawMeasurement) -> NormalizedSpectrum:
    """
    Divide a sample by a reference measurement.

    The ratio is taken on the sample points inside the reference range, with
    the reference linearly interpolated, and clipped to [0, 1.2]; clipped
    points are flagged.

    Raises:
        AlignmentError: the grids do not overlap
        BadReferenceError: reference below 1e-6 of its maximum where needed
    """
    if len(sample) == 0 or len(reference) == 0:
        raise AlignmentError("cannot normalize an empty measurement")
    low, high = reference.energies[0], reference.energies[-1]
    inside = (sample.energies >= low) & (sample.energies <= high)
    if not np.any(inside):
        raise AlignmentError("sample and reference grids do not overlap")
    energies = sample.energies[inside]
    ref = np.interp(energies, reference.energies, reference.counts)
    floor = REFERENCE_FLOOR * float(reference.counts.max())
    weak = ref <= floor
    if np.any(weak):
        at = float(energies[np.argmax(weak)])
        raise BadReferenceError(
            f"reference {reference.sample_id!r} vanishes at {at:.4f} eV"
        )
    ratio = sample.counts[inside] / ref
    flagged = np.flatnonzero((ratio < 0) | (ratio > NORMALIZED_CEILING))
    if flagged.size:
        logger.warning(
            "%d normalized points of %r clipped to [0, %.1f]",
            flagged.size,
            sample.sample_id,
            NORMALIZED_CEILING,
        )
    ratio = np.clip(ratio, 0.0, NORMALIZED_CEILING)
    return NormalizedSpectrum(Spectrum(energies, ratio, Channel.RAW), flagged)


def _parse_float(text: str, path: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise CsvParseError(path, row, f"{column} {text.strip()!r} is not a number")
    if not np.isfinite(value):
        raise CsvParseError(path, row, f"{column} is not finite")
    return value


def parse_spectrum_csv(
    text: str,
    source: str = "<string>",
    channel: Channel = Channel.RAW,
    sample_id: Optional[str] = None,
) -> RawMeasurement:
    """
    Parse `energy_ev,value` CSV text. Row numbers in errors are file line
    numbers, the header being line 1.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip().lower() for h in header) != SPECTRUM_HEADER:
        raise CsvParseError(source, 1, f"expected header {','.join(SPECTRUM_HEADER)}")
    energies, values = [], []
    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise CsvParseError(
                source, row_number, f"expected 2 columns, got {len(row)}"
            )
        energy = _parse_float(row[0], source, row_number, "energy")
        value = _parse_float(row[1], source, row_number, "value")
        if value < -BOUND_SLACK:
            raise CsvParseError(source, row_number, "value must be >= 0")
        if energies and energy <= energies[-1]:
            raise GridOrderError(
                f"{source}: row {row_number}: energy {energy} does not increase"
            )
        energies.append(energy)
        values.append(value)
    return RawMeasurement(
        np.array(energies, dtype=float),
        np.array(values, dtype=float),
        sample_id=sample_id if sample_id is not None else Path(source).stem,
        channel=channel,
    )


def read_spectrum_csv(
    path: Union[str, Path], channel: Channel = Channel.RAW
) -> RawMeasurement:
    """
    Read a spectrum CSV file.

    Raises:
        SpectrumIOError: the file cannot be read
        CsvParseError: malformed header or row
        GridOrderError: energies not strictly increasing
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpectrumIOError(f"cannot read {path}: {e}")
    return parse_spectrum_csv(text, str(path), channel, sample_id=path.stem)


def format_spectrum_csv(spectrum: Union[Spectrum, RawMeasurement]) -> str:
    """CSV text with 17 significant digits and LF line endings"""
    if isinstance(spectrum, RawMeasurement):
        values = spectrum.counts
    else:
        values = spectrum.values
    lines = [",".join(SPECTRUM_HEADER)]
    lines += [f"{e:.17g},{v:.17g}" for e, v in zip(spectrum.energies, values)]
    return "\n".join(lines) + "\n"


def write_spectrum_csv(
    spectrum: Union[Spectrum, RawMeasurement], path: Union[str, Path]
) -> None:
    write_text_file(path, format_spectrum_csv(spectrum))


def write_text_file(path: Union[str, Path], text: str) -> None:
    """UTF-8 text with LF line endings on every platform"""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as e:
        raise SpectrumIOError(f"cannot write {path}: {e}")
