"""Exact and Monte Carlo diagnostics for strong-to-weak symmetry breaking in mixed states."""

__version__ = "0.1.0"

from .operators import NotHermitianError, NotPSDError, RankDeficientError
from .states import DensityMatrix, TFDState, tfd
from .correlators import fidelity_correlator, wightman

__all__ = ["NotHermitianError", "NotPSDError", "RankDeficientError", "DensityMatrix", "TFDState", "tfd",
           "fidelity_correlator", "wightman", "__version__"]
