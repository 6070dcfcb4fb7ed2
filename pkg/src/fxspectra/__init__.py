"""Per-base correlation spectra and collectivity ladders for FX rate panels."""

from .analysis import Ladder, LadderEntry, PerBaseReport, build_ladder, per_base_report, sector_ladder
from .corrmat import CorrelationMatrix, OffDiagHistogram, correlation_matrix, offdiag_histogram
from .ingest import PreprocessConfig, RatePanel, RawQuoteTable, despike, load_raw, preprocess, synchronize
from .nullmodels import NullSpec, fictitious_panel, one_factor_panel, random_panel
from .rates import BaseChangeReport, ReturnPanel, log_returns, normalize, rebase, verify_constraints
from .spectra import EigenSpectrum, RmtBounds, collectivity_summary, eigendecompose, ipr, rmt_bounds

__version__ = "0.1.0"

__all__ = [
    "BaseChangeReport",
    "CorrelationMatrix",
    "EigenSpectrum",
    "Ladder",
    "LadderEntry",
    "NullSpec",
    "OffDiagHistogram",
    "PerBaseReport",
    "PreprocessConfig",
    "RatePanel",
    "RawQuoteTable",
    "ReturnPanel",
    "RmtBounds",
    "build_ladder",
    "collectivity_summary",
    "correlation_matrix",
    "despike",
    "eigendecompose",
    "fictitious_panel",
    "ipr",
    "load_raw",
    "log_returns",
    "normalize",
    "offdiag_histogram",
    "one_factor_panel",
    "per_base_report",
    "preprocess",
    "random_panel",
    "rebase",
    "rmt_bounds",
    "sector_ladder",
    "synchronize",
    "verify_constraints",
    "__version__",
]
