"""Hierarchical support vector regression with spectrum-derived kernel scales."""
from ._kernels import backend
from .errors import (
    HsvrError,
    NoOscillatoryContent,
)
from .hsvr import HsvrModel, LayerReport, epsilon_rule, c_rule, layerwise_errors, phase_sweep
from .hsvr import predict as hsvr_predict, train as train_hsvr
from .signals import Signal, generate_named, lorenz_trajectory, split_alternating
from .spectral_dmd import dmd_scales
from .spectral_fft import ScaleEstimate, fft_scales, filter_scales
from .svr import SvrConfig, SvrModel

__version__ = "0.1.0"

__all__ = [
    "HsvrError",
    "HsvrModel",
    "LayerReport",
    "NoOscillatoryContent",
    "ScaleEstimate",
    "Signal",
    "SvrConfig",
    "SvrModel",
    "backend",
    "c_rule",
    "dmd_scales",
    "epsilon_rule",
    "fft_scales",
    "filter_scales",
    "generate_named",
    "hsvr_predict",
    "layerwise_errors",
    "lorenz_trajectory",
    "phase_sweep",
    "split_alternating",
    "train_hsvr",
]
