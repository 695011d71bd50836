"""
Exception hierarchy for polariscope

Every error carries the CLI exit code it maps to: 2 for schema and model
validation, 3 for analysis and fit failures, 4 for file I/O.
"""

from typing import Optional


class PolariscopeError(Exception):
    """Base class for all polariscope errors"""

    exit_code = 1


class ConfigSchemaError(PolariscopeError):
    """Configuration document does not match the schema"""

    exit_code = 2


class InvalidModelError(PolariscopeError):
    """Dielectric model with non-physical or non-finite parameters"""

    exit_code = 2


class InvalidStackError(PolariscopeError):
    """Layer stack violates the ambient/interior/substrate layout"""

    exit_code = 2


class InvalidLawError(PolariscopeError):
    """Scattering law that cannot be renormalized"""

    exit_code = 2


class UndefinedMixtureError(PolariscopeError):
    """Hopfield weights requested with zero coupling at zero detuning"""

    exit_code = 2


class AnalysisError(PolariscopeError):
    """Base class for analysis failures"""

    exit_code = 3


class InsufficientDataError(AnalysisError):
    pass


class FitFailedError(AnalysisError):
    """Least-squares fit did not converge"""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DegenerateFitError(AnalysisError):
    """Two-peak fit collapsed onto a single peak"""


class BadStartError(AnalysisError):
    """Residual is not finite at the initial parameters"""


class JacobianError(AnalysisError):
    pass


class UnresolvedSplittingError(AnalysisError):
    """Fewer than two extrema could be resolved in a spectrum"""


class NoCrossingError(AnalysisError):
    pass


class NotTunableError(AnalysisError):
    """Target cavity resonance cannot be reached by the thickness bracket"""


class UndefinedRatioError(AnalysisError):
    pass


class AlignmentError(AnalysisError):
    """Spectra live on different energy grids"""


class UnphysicalBalanceError(AnalysisError):
    """R + T + S exceeds unity beyond tolerance"""


class SpectrumIOError(PolariscopeError):
    """Base class for file I/O errors"""

    exit_code = 4


class CsvParseError(SpectrumIOError):
    """Malformed CSV row"""

    def __init__(self, path: str, row: int, message: str):
        super().__init__(f"{path}: row {row}: {message}")
        self.path = path
        self.row = row


class GridOrderError(SpectrumIOError):
    """Energy grid is not strictly increasing"""


class BadReferenceError(SpectrumIOError):
    """Reference measurement is zero where the sample needs it"""
