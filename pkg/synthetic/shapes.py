"""
Synthetic Shapes
Location: jetnormals/synthetic/shapes.py

Point clouds sampled from surfaces with analytic normals: jet height
fields over [-1, 1]^2, spheres and dihedral edges (two half-planes meeting
at a crease along the y axis).
"""

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from config.settings import SHAPES
from fitting.jets import JetModel, evaluate_jet, neighbor_normals
from geometry.point_cloud import PointCloud
from utils.exceptions import InvalidInputError
from utils.validators import require_choice, require_int_range, require_real_range

logger = logging.getLogger(__name__)

MIN_POINTS = 16


@dataclass
class ShapeSpec:
    """
    What to sample.

    parameters holds the jet coefficients for a quadric (any complete
    order, JetModel ordering), the radius for a sphere, or the opening
    angle in degrees for a dihedral edge.
    """
    kind: str
    parameters: Tuple[float, ...] = field(default_factory=tuple)
    count: int = 10000
    seed: int = 0

    def __post_init__(self):
        require_choice("kind", self.kind, SHAPES)
        require_int_range("count", self.count, minimum=MIN_POINTS)
        require_int_range("seed", self.seed, minimum=0)
        self.parameters = tuple(float(p) for p in self.parameters)

        if self.kind == "sphere":
            self._single_parameter("radius")
            require_real_range("radius", self.parameters[0], 0.0, strict_minimum=True)
        elif self.kind == "dihedral":
            self._single_parameter("angle")
            angle = require_real_range("angle", self.parameters[0], 0.0, strict_minimum=True)
            if angle >= 180.0:
                raise InvalidInputError(f"dihedral angle must be below 180 degrees, got {angle}", "angle")
        else:
            self.jet_model()

    def _single_parameter(self, name: str):
        if len(self.parameters) != 1:
            raise InvalidInputError(f"{self.kind} takes exactly one parameter ({name})", "parameters")

    @property
    def name(self) -> str:
        return f"{self.kind}_{self.seed}"

    def jet_model(self) -> JetModel:
        """Height field of a quadric spec; the coefficient count fixes the order"""
        count = len(self.parameters)
        order = 0
        while (order + 1) * (order + 2) // 2 < count:
            order += 1
        if (order + 1) * (order + 2) // 2 != count or order < 1:
            raise InvalidInputError(
                f"{count} coefficients do not form a complete jet of order >= 1", "parameters")
        return JetModel(order=order, beta=np.array(self.parameters))


def _height_field(spec: ShapeSpec, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    model = spec.jet_model()
    xy = rng.uniform(-1.0, 1.0, size=(spec.count, 2))
    points = np.column_stack((xy, evaluate_jet(model, xy)))
    return points, neighbor_normals(model, xy)


def _sphere(spec: ShapeSpec, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    directions = rng.standard_normal(size=(spec.count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return spec.parameters[0] * directions, directions


def dihedral_frame(angle_deg: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    In-plane directions (away from the crease) and unit normals of both
    half-planes: plane A is z = 0 for x <= 0, plane B opens by angle_deg
    from it about the y axis.
    """
    theta = np.radians(angle_deg)
    direction_a = np.array([-1.0, 0.0, 0.0])
    normal_a = np.array([0.0, 0.0, 1.0])
    direction_b = np.array([-np.cos(theta), 0.0, np.sin(theta)])
    normal_b = np.array([-np.sin(theta), 0.0, -np.cos(theta)])
    return direction_a, normal_a, direction_b, normal_b


def _dihedral(spec: ShapeSpec, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    direction_a, normal_a, direction_b, normal_b = dihedral_frame(spec.parameters[0])
    on_b = rng.random(spec.count) < 0.5
    distance = rng.uniform(0.0, 1.0, size=spec.count)
    along_crease = rng.uniform(-1.0, 1.0, size=spec.count)

    directions = np.where(on_b[:, None], direction_b, direction_a)
    points = distance[:, None] * directions
    points[:, 1] = along_crease

    normals = np.where(on_b[:, None], normal_b, normal_a)
    bisector = normal_a + normal_b
    normals[distance == 0.0] = bisector / np.linalg.norm(bisector)
    return points, normals


_GENERATORS = {
    "quadric": _height_field,
    "sphere": _sphere,
    "dihedral": _dihedral,
}


def gen_shape(spec: ShapeSpec) -> PointCloud:
    """Sample spec.count points with analytic ground-truth normals"""
    if not isinstance(spec, ShapeSpec):
        raise InvalidInputError(f"expected a ShapeSpec, got {type(spec).__name__}", "spec")
    rng = np.random.default_rng(spec.seed)
    points, normals = _GENERATORS[spec.kind](spec, rng)
    logger.debug(f"Generated {spec.count} points of {spec.kind} {spec.parameters}")
    return PointCloud(points=points, gt_normals=normals, name=spec.name)


def crease_distance(points: np.ndarray) -> np.ndarray:
    """Distance of dihedral-edge points to the crease (the y axis)"""
    points = np.asarray(points, dtype=np.float64)
    return np.hypot(points[:, 0], points[:, 2])
