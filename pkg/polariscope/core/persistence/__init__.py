"""
File formats, run registry and provenance manifests
"""

from .bundle import MANIFEST_FILE, OutputBundle
from .models import RunManifest, RunRecordModel, json_text, sha256_text
from .series_io import (
    format_concentration_csv,
    format_series_csv,
    read_series_csv,
    write_series_csv,
)
from .service import RunStorageService
from .spectrum_io import (
    NormalizedSpectrum,
    RawMeasurement,
    format_spectrum_csv,
    normalize,
    read_spectrum_csv,
    write_spectrum_csv,
)

__all__ = [
    "MANIFEST_FILE",
    "OutputBundle",
    "NormalizedSpectrum",
    "RawMeasurement",
    "RunManifest",
    "RunRecordModel",
    "RunStorageService",
    "format_concentration_csv",
    "format_series_csv",
    "format_spectrum_csv",
    "json_text",
    "normalize",
    "read_series_csv",
    "read_spectrum_csv",
    "sha256_text",
    "write_series_csv",
    "write_spectrum_csv",
]
