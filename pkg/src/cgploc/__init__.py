"""Coherence-generating power as a probe of Anderson and many-body localization."""

from .coherence import LogBase, cgp2, cgp_rel, f_det, f_inf
from .experiments import EnsembleConfig, fit_rate, run_sweep
from .spectral import SpectralDecomposition, eigendecompose, transition_matrix

__version__ = "0.1.0"

__all__ = [
    "LogBase",
    "cgp2",
    "cgp_rel",
    "f_det",
    "f_inf",
    "EnsembleConfig",
    "fit_rate",
    "run_sweep",
    "SpectralDecomposition",
    "eigendecompose",
    "transition_matrix",
]
