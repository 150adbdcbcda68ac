"""Kernel (polynomial) Granger causality and connectivity fusion toolkit."""

__version__ = "0.1.0"

from .featmap import FeatureMapSpec, expand, expand_mp, expand_rp, expand_rsp, expanded_dim
from .gc_engine import (GCMatrix, RegressionFit, accumulated_gci, fit_least_squares,
                        gc_matrix, gci_pair, select_global_lag, select_lag_bic)
from .tsio import (LaggedDesign, TimeSeriesMatrix, build_lagged_design, load_csv,
                   standardize)

__all__ = [
    "FeatureMapSpec", "GCMatrix", "LaggedDesign", "RegressionFit", "TimeSeriesMatrix",
    "accumulated_gci", "build_lagged_design", "expand", "expand_mp", "expand_rp",
    "expand_rsp", "expanded_dim", "fit_least_squares", "gc_matrix", "gci_pair",
    "load_csv", "select_global_lag", "select_lag_bic", "standardize",
]
