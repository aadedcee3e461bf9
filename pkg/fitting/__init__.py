"""
Jet Fitting Package
Location: jetnormals/fitting/__init__.py

Plain and weighted least-squares n-jet fitting, in numpy for the classic
estimators and in torch for the learned pipeline.
"""

from .jets import (
    DEFAULT_ORDER,
    FitDiagnostics,
    JetModel,
    build_vandermonde,
    evaluate_jet,
    jet_term_count,
    ls_fit,
    neighbor_normals,
    normal_from_beta,
    surface_grid,
    wls_fit,
)

__all__ = [
    'DEFAULT_ORDER', 'FitDiagnostics', 'JetModel', 'build_vandermonde', 'evaluate_jet',
    'jet_term_count', 'ls_fit', 'neighbor_normals', 'normal_from_beta', 'surface_grid', 'wls_fit',
]
