"""
Core Package Initialization
Location: jetnormals/core/__init__.py

Cloud-level normal estimators, single-patch fit inspection and the
sharp-feature training benchmark.
"""

from .estimators import JetEstimator, LearnedEstimator, NormalEstimator, PCAEstimator, make_estimator
from .benchmark import BenchmarkResult, desk_scale_benchmark
from .fit_debug import FitDebugResult, debug_patch, export_fit_debug

__all__ = [
    'JetEstimator',
    'LearnedEstimator',
    'NormalEstimator',
    'PCAEstimator',
    'make_estimator',
    'FitDebugResult',
    'debug_patch',
    'export_fit_debug',
    'BenchmarkResult',
    'desk_scale_benchmark',
]
