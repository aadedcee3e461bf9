"""
Jet Surface Fitting
Location: jetnormals/fitting/jets.py

Truncated Taylor expansion ("n-jet") height functions z = f(x, y) fitted to
aligned patch points by plain or weighted least squares, plus the normal
and height evaluations derived from a fitted jet.

Coefficients are ordered degree-major, then by descending power of x:
beta_00, beta_10, beta_01, beta_20, beta_11, beta_02, ...
Systems are solved by QR on the row-scaled matrix sqrt(W) M; the normal
equations are never inverted explicitly.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np
import scipy.linalg as la

from utils.exceptions import InvalidInputError, UnderdeterminedSystemError
from utils.validators import require_int_range

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
RIDGE = 1e-8
WEIGHT_FLOOR = 1e-7
DEFAULT_ORDER = 3


@dataclass(eq=False)
class JetModel:
    """Polynomial order and coefficient vector of an n-jet"""
    order: int
    beta: np.ndarray

    def __post_init__(self):
        self.order = require_int_range("order", self.order, minimum=0)
        beta = np.array(self.beta, dtype=np.float64).reshape(-1)
        if len(beta) != jet_term_count(self.order):
            raise InvalidInputError(
                f"order {self.order} needs {jet_term_count(self.order)} coefficients, got {len(beta)}", "beta")
        if not np.all(np.isfinite(beta)):
            raise InvalidInputError("jet coefficients must be finite", "beta")
        self.beta = beta


@dataclass
class FitDiagnostics:
    """Numerical health of one least-squares solve"""
    residual_norm: float
    condition_hint: float
    ridge_applied: bool = False


@dataclass(eq=False)
class WeightedSolution:
    """Raw solver output shared with the differentiable fit"""
    beta: np.ndarray
    r_factor: np.ndarray
    diagnostics: FitDiagnostics = field(default_factory=lambda: FitDiagnostics(0.0, 0.0))


def jet_term_count(n: int) -> int:
    """Number of coefficients of an order-n jet: (n+1)(n+2)/2"""
    n = require_int_range("n", n, minimum=0)
    return (n + 1) * (n + 2) // 2


@lru_cache(maxsize=None)
def monomial_exponents(n: int) -> Tuple[Tuple[int, int], ...]:
    """(x power, y power) for each coefficient, in JetModel order"""
    return tuple((s - t, t) for s in range(n + 1) for t in range(s + 1))


def _as_xy(xy) -> np.ndarray:
    xy = np.asarray(xy, dtype=np.float64)
    if xy.ndim == 1:
        xy = xy.reshape(1, -1)
    if xy.ndim != 2 or xy.shape[1] < 2:
        raise InvalidInputError(f"expected (k, 2) coordinates, got {xy.shape}", "xy")
    return xy[:, :2]


def build_vandermonde(xy, n: int) -> np.ndarray:
    """Rows of monomials x^a y^b for each point; column 0 is all ones"""
    xy = _as_xy(xy)
    if len(xy) < 1:
        raise InvalidInputError("need at least one point", "xy")
    x, y = xy[:, 0], xy[:, 1]
    columns = [x ** a * y ** b for a, b in monomial_exponents(n)]
    return np.column_stack(columns)


def solve_weighted_system(vandermonde: np.ndarray, weights: np.ndarray, heights: np.ndarray) -> WeightedSolution:
    """
    Minimize ||sqrt(W) (M beta - B)||^2 by QR.

    When the ratio of extreme |diag(R)| exceeds CONDITION_LIMIT the system is
    re-solved with RIDGE * I added to M^T W M (as extra rows of the QR).
    The returned R factor always satisfies R^T R = M^T W M (+ ridge).
    """
    n_terms = vandermonde.shape[1]
    positive = int(np.count_nonzero(weights > WEIGHT_FLOOR))
    if positive < n_terms:
        raise UnderdeterminedSystemError(required=n_terms, available=positive)

    sqrt_w = np.sqrt(weights)
    scaled = vandermonde * sqrt_w[:, None]
    rhs = heights * sqrt_w

    _, r_factor = la.qr(scaled, mode='economic')
    diagonal = np.abs(np.diag(r_factor))
    smallest = float(diagonal.min())
    condition = float(diagonal.max() / smallest) if smallest > 0 else float('inf')

    ridge_applied = condition > CONDITION_LIMIT
    if ridge_applied:
        logger.debug(f"Jet system condition {condition:.3g} above limit, applying ridge {RIDGE}")
        scaled = np.vstack((scaled, np.sqrt(RIDGE) * np.eye(n_terms)))
        rhs = np.concatenate((rhs, np.zeros(n_terms)))

    q_factor, r_factor = la.qr(scaled, mode='economic')
    beta = la.solve_triangular(r_factor, q_factor.T @ rhs, lower=False)

    residual = float(np.linalg.norm(sqrt_w * (vandermonde @ beta - heights)))
    return WeightedSolution(
        beta=beta,
        r_factor=r_factor,
        diagnostics=FitDiagnostics(residual_norm=residual, condition_hint=condition,
                                   ridge_applied=ridge_applied),
    )


def _as_points(points) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 3:
        raise InvalidInputError(f"expected (k, 3) aligned points, got {points.shape}", "points")
    return points


def wls_fit(points, weights, n: int) -> Tuple[JetModel, FitDiagnostics]:
    """Weighted least-squares n-jet through aligned points (z is the height)"""
    points = _as_points(points)
    weights = np.asarray(weights, dtype=np.float64).reshape(-1)
    if len(weights) != len(points):
        raise InvalidInputError(f"{len(weights)} weights for {len(points)} points", "weights")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise InvalidInputError("weights must be finite and nonnegative", "weights")

    n_terms = jet_term_count(n)
    if len(points) < n_terms:
        raise UnderdeterminedSystemError(required=n_terms, available=len(points))

    solution = solve_weighted_system(build_vandermonde(points[:, :2], n), weights, points[:, 2])
    return JetModel(order=n, beta=solution.beta), solution.diagnostics


def ls_fit(points, n: int) -> Tuple[JetModel, FitDiagnostics]:
    """Unweighted least-squares n-jet"""
    points = _as_points(points)
    return wls_fit(points, np.ones(len(points)), n)


def normal_from_beta(model: JetModel) -> np.ndarray:
    """Unit normal of the jet at the patch origin: (-beta_10, -beta_01, 1) normalized"""
    if model.order < 1:
        raise InvalidInputError("normals need a jet of order >= 1", "order")
    normal = np.array([-model.beta[1], -model.beta[2], 1.0])
    return normal / np.sqrt(np.sum(normal * normal))


def jet_gradient(model: JetModel, xy) -> np.ndarray:
    """(df/dx, df/dy) at each query point"""
    xy = _as_xy(xy)
    x, y = xy[:, 0], xy[:, 1]
    gradient = np.zeros((len(xy), 2))
    for coefficient, (a, b) in zip(model.beta, monomial_exponents(model.order)):
        if a > 0:
            gradient[:, 0] += coefficient * a * x ** (a - 1) * y ** b
        if b > 0:
            gradient[:, 1] += coefficient * b * x ** a * y ** (b - 1)
    return gradient


def neighbor_normals(model: JetModel, xy) -> np.ndarray:
    """Unit normals (-df/dx, -df/dy, 1)/|.| of the jet surface at each (x, y)"""
    if model.order < 1:
        raise InvalidInputError("normals need a jet of order >= 1", "order")
    gradient = jet_gradient(model, xy)
    normals = np.column_stack((-gradient[:, 0], -gradient[:, 1], np.ones(len(gradient))))
    return normals / np.sqrt(np.sum(normals * normals, axis=1, keepdims=True))


def evaluate_jet(model: JetModel, xy) -> np.ndarray:
    """Jet heights f(x, y) at each query point"""
    return build_vandermonde(xy, model.order) @ model.beta


def surface_grid(model: JetModel, extent: float = 1.0, resolution: int = 32) -> np.ndarray:
    """Regular (resolution^2, 3) grid of jet surface points over [-extent, extent]^2"""
    axis = np.linspace(-extent, extent, resolution)
    gx, gy = np.meshgrid(axis, axis, indexing='xy')
    xy = np.column_stack((gx.ravel(), gy.ravel()))
    return np.column_stack((xy, evaluate_jet(model, xy)))
