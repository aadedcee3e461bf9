"""
Configuration Management Module
Location: jetnormals/config/settings.py

Handles environment-based logging configuration and the run configuration
shared by every command. A run configuration is assembled from defaults,
an optional flat `key = value` file and command-line flags, in that order,
and is validated against the operation preconditions before any command
writes output.
"""

import dataclasses
import os
import typing
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from dotenv import dotenv_values

from utils.exceptions import ConfigurationError, InvalidInputError
from utils import validators

METHODS = ("pca", "jet", "learned")
SHAPES = ("quadric", "sphere", "dihedral")
DENSITY_MODES = ("none", "gradient", "stripes")
HEATMAP_FORMATS = ("csv", "ply")
NEIGHBOR_TARGETS = ("center", "neighbor")
MAX_JET_ORDER = 4


@dataclass
class LoggingConfig:
    """Logging configuration"""
    level: str = field(default_factory=lambda: os.getenv('JETNORMALS_LOG_LEVEL', 'INFO'))
    file: Optional[str] = field(default_factory=lambda: os.getenv('JETNORMALS_LOG_FILE') or None)
    max_bytes: int = field(
        default_factory=lambda: int(os.getenv('JETNORMALS_LOG_MAX_BYTES', str(10 * 1024 * 1024))))  # 10 MB
    backup_count: int = field(default_factory=lambda: int(os.getenv('JETNORMALS_LOG_BACKUP_COUNT', '5')))


@dataclass
class RunConfig:
    """Every parameter any command accepts; flags override file values"""

    # shared
    seed: int = 0
    threads: int = 0
    out: Optional[str] = None
    input: Tuple[str, ...] = ()

    # synth
    shape: str = "quadric"
    coeffs: Tuple[float, ...] = (0.0, 0.0, 0.0, 0.5, 0.0, -0.5)
    radius: float = 1.0
    angle: float = 90.0
    count: int = 10000
    sigma: float = 0.0
    density: str = "none"
    corpus: Optional[str] = None
    train_shapes: int = 8
    test_shapes: int = 4

    # estimate / fit-debug
    method: str = "jet"
    checkpoint: Optional[str] = None
    order: int = 3
    k: Optional[int] = None
    patch_size: int = 256
    m: int = 8
    center: int = 0
    grid: int = 32

    # train
    shapes: Optional[str] = None
    patches_per_shape: int = 250
    alpha1: float = 1.0
    alpha2: float = 0.1
    lr: float = 1e-3
    epochs: int = 10
    batch_size: int = 48
    trace: Optional[str] = None
    use_topk: bool = True
    use_update: bool = True
    force_center: bool = False
    neighbor_target: str = "center"

    # eval
    normals: Optional[str] = None
    idx: Optional[str] = None
    category: Optional[str] = None
    subset_size: int = 5000
    heatmap: Optional[str] = None
    heatmap_format: str = "csv"

    # gradcheck
    samples: int = 20
    tolerance: float = 1e-4
    step: float = 1e-5

    @classmethod
    def load(cls, config_path: Optional[str] = None, overrides: Dict[str, Any] = None) -> "RunConfig":
        """Build a configuration from defaults, a config file and flag overrides"""
        values: Dict[str, Any] = {}
        known = {f.name for f in dataclasses.fields(cls)}
        hints = typing.get_type_hints(cls)

        if config_path:
            if not os.path.isfile(config_path):
                raise ConfigurationError(f"Config file not found: {config_path}")
            for raw_key, raw_value in dotenv_values(config_path).items():
                key = raw_key.strip().replace("-", "_")
                if key not in known:
                    raise ConfigurationError(f"Unknown configuration key '{raw_key}' in {config_path}", key)
                values[key] = _coerce(key, raw_value, hints[key])

        for key, value in (overrides or {}).items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigurationError(f"Unknown configuration key '{key}'", key)
            if value is None:
                continue
            values[key] = _coerce(key, value, hints[key]) if isinstance(value, str) else value

        return cls(**values)

    @property
    def effective_k(self) -> int:
        """Selection count, defaulting to 50 per 256 patch points"""
        from fitting.jets import jet_term_count
        if self.k is not None:
            return self.k
        return max(jet_term_count(self.order), int(round(self.patch_size * 50 / 256)))

    def validate_for(self, command: str) -> "RunConfig":
        """Check every parameter the command uses; raises before any output is written"""
        from fitting.jets import jet_term_count
        try:
            validators.require_int_range("seed", self.seed, minimum=0)
            validators.require_int_range("threads", self.threads, minimum=0)

            if command == "synth":
                validators.require_choice("shape", self.shape, SHAPES)
                validators.require_choice("density", self.density, DENSITY_MODES)
                validators.require_real_range("sigma", self.sigma, 0.0, 0.05)
                validators.require_int_range("count", self.count, minimum=16)
                validators.require_real_range("radius", self.radius, 0.0, strict_minimum=True)
                validators.require_real_range("angle", self.angle, 0.0, strict_minimum=True)
                if self.angle >= 180.0:
                    raise InvalidInputError("dihedral angle must be < 180 degrees", "angle")
                validators.require_int_range("train_shapes", self.train_shapes, minimum=1)
                validators.require_int_range("test_shapes", self.test_shapes, minimum=1)
                if not self.out and not self.corpus:
                    raise InvalidInputError("either --out or --corpus is required", "out")

            if command in ("estimate", "fit-debug", "train", "gradcheck"):
                validators.require_int_range("order", self.order, 1, MAX_JET_ORDER)
                validators.require_int_range("patch_size", self.patch_size, minimum=3)
                k = validators.require_int_range("k", self.effective_k, 1, self.patch_size)
                needs_fit = command != "estimate" or self.method != "pca"
                if needs_fit and k < jet_term_count(self.order):
                    raise InvalidInputError(
                        f"k={k} is below the {jet_term_count(self.order)} coefficients"
                        f" of an order-{self.order} jet", "k")
                if needs_fit and self.patch_size < jet_term_count(self.order):
                    raise InvalidInputError("patch size is below the jet coefficient count", "patch_size")
                if command in ("train", "gradcheck") and self.use_update:
                    if k < 2:
                        raise InvalidInputError("point update needs k >= 2", "k")
                    validators.require_int_range("m", self.m, 1, k - 1)

            if command in ("estimate", "fit-debug"):
                validators.require_choice("method", self.method, METHODS)
                if self.method == "learned" and not self.checkpoint:
                    raise InvalidInputError("--method learned requires --checkpoint", "checkpoint")
                if len(self.input) != 1:
                    raise InvalidInputError("exactly one input cloud is required", "input")

            if command == "estimate" and not self.out:
                raise InvalidInputError("--out is required", "out")

            if command == "fit-debug":
                validators.require_int_range("center", self.center, minimum=0)
                validators.require_int_range("grid", self.grid, minimum=2)
                if not self.out:
                    raise InvalidInputError("--out prefix is required", "out")

            if command == "train":
                validators.require_real_range("alpha1", self.alpha1, 0.0)
                validators.require_real_range("alpha2", self.alpha2, 0.0)
                validators.require_real_range("lr", self.lr, 0.0, strict_minimum=True)
                validators.require_int_range("epochs", self.epochs, minimum=0)
                validators.require_int_range("batch_size", self.batch_size, minimum=1)
                validators.require_int_range("patches_per_shape", self.patches_per_shape, minimum=1)
                validators.require_choice("neighbor_target", self.neighbor_target, NEIGHBOR_TARGETS)
                if not self.input and not self.shapes:
                    raise InvalidInputError("--input or --shapes is required", "input")
                if not self.out:
                    raise InvalidInputError("--out checkpoint path is required", "out")

            if command == "eval":
                if not self.input:
                    raise InvalidInputError("at least one --input cloud is required", "input")
                if not self.normals:
                    raise InvalidInputError("--normals is required", "normals")
                validators.require_int_range("subset_size", self.subset_size, minimum=1)
                validators.require_choice("heatmap_format", self.heatmap_format, HEATMAP_FORMATS)
                if not self.out:
                    raise InvalidInputError("--out report path is required", "out")

            if command == "gradcheck":
                validators.require_int_range("samples", self.samples, minimum=1)
                validators.require_real_range("tolerance", self.tolerance, 0.0, strict_minimum=True)
                validators.require_real_range("step", self.step, 0.0, strict_minimum=True)
        except InvalidInputError as e:
            raise ConfigurationError(e.message, e.field)
        return self

    def network_config(self):
        """Network hyper-parameters for a fresh model"""
        from network.params import NetworkConfig
        return NetworkConfig(
            order=self.order,
            k=self.effective_k,
            patch_size=self.patch_size,
            m=self.m,
            use_topk=self.use_topk,
            use_update=self.use_update,
            force_center=self.force_center,
        )

    def train_config(self):
        """Training hyper-parameters"""
        from training.trainer import TrainConfig
        return TrainConfig(
            batch_size=self.batch_size,
            learning_rate=self.lr,
            epochs=self.epochs,
            alpha1=self.alpha1,
            alpha2=self.alpha2,
            k=self.effective_k,
            r=self.patch_size,
            n=self.order,
            m=self.m,
            seed=self.seed,
            use_topk=self.use_topk,
            use_update=self.use_update,
            force_center=self.force_center,
            neighbor_target=self.neighbor_target,
        )


def _coerce(key: str, value: Any, hint: Any) -> Any:
    """Convert a textual config value to the field's declared type"""
    text = str(value).strip()
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    try:
        if origin is typing.Union and type(None) in args:
            if text == "" or text.lower() == "none":
                return None
            inner = next(a for a in args if a is not type(None))
            return _coerce(key, text, inner)
        if origin is tuple:
            item_type = args[0]
            return tuple(item_type(part.strip()) for part in text.split(",") if part.strip())
        if hint is bool:
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if hint is int:
            return int(text)
        if hint is float:
            return float(text)
        return text
    except (TypeError, ValueError):
        raise ConfigurationError(f"Invalid value {text!r} for '{key}'", key)
