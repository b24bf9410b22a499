"""Figure rendering for the concentration-estimator benchmark CSVs."""

from .figures import PlotDataError, plot_error_curves, plot_fit_panels, plot_timing
from .io import FITS_HEADER, RAW_HEADER, SUMMARY_HEADER, SchemaError

__version__ = "0.1.0"

__all__ = [
    "PlotDataError",
    "plot_error_curves",
    "plot_fit_panels",
    "plot_timing",
    "SchemaError",
    "RAW_HEADER",
    "SUMMARY_HEADER",
    "FITS_HEADER",
    "__version__",
]
