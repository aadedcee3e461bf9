"""
Custom Exceptions Module

Location: jetnormals/utils/exceptions.py

Defines application-specific exceptions for error handling throughout the
normal estimation pipeline, from file parsing to training.
"""

from typing import Optional


class JetNormalsError(Exception):
    """Base exception class for all jetnormals-specific errors"""

    def __init__(self, message: str, error_code: str = None, details: dict = None):
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)


class ConfigurationError(JetNormalsError):
    """Raised when a run configuration is unknown, ill-typed or inconsistent"""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(
            message=message,
            error_code="CONFIG_ERROR",
            details={"key": key}
        )


class InvalidInputError(JetNormalsError):
    """Raised when an argument violates an operation's precondition"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        text = f"Invalid input for '{field}': {message}" if field else message
        super().__init__(
            message=text,
            error_code="INVALID_INPUT",
            details={"field": field}
        )


class DegeneratePatchError(JetNormalsError):
    """Raised when a patch has no usable extent or spans fewer than two directions"""

    def __init__(self, message: str, center_index: Optional[int] = None):
        self.center_index = center_index
        super().__init__(
            message=message,
            error_code="DEGENERATE_PATCH",
            details={"center_index": center_index}
        )


class UnderdeterminedSystemError(JetNormalsError):
    """Raised when a least-squares fit has fewer usable rows than unknowns"""

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            message=f"Jet fit needs at least {required} points with positive weight, got {available}",
            error_code="UNDERDETERMINED",
            details={"required": required, "available": available}
        )


class PointFileParseError(JetNormalsError):
    """Raised when a point, normal or index file contains a malformed line"""

    def __init__(self, path: str, line_number: int, message: str):
        self.path = path
        self.line_number = line_number
        super().__init__(
            message=f"{path}, line {line_number}: {message}",
            error_code="PARSE_ERROR",
            details={"path": path, "line": line_number}
        )


class OutputWriteError(JetNormalsError):
    """Raised when an output file cannot be written"""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(
            message=f"Cannot write {path}: {message}",
            error_code="IO_ERROR",
            details={"path": path}
        )


class CheckpointError(JetNormalsError):
    """Raised when a checkpoint file is malformed or inconsistent with its metadata"""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(
            message=f"{path}: {message}" if path else message,
            error_code="CHECKPOINT_ERROR",
            details={"path": path}
        )


class TrainingDivergenceError(JetNormalsError):
    """Raised when the training loss stops being finite"""

    def __init__(self, epoch: int, batch_index: int, loss: float):
        self.epoch = epoch
        self.batch_index = batch_index
        self.loss = loss
        super().__init__(
            message=f"Training diverged at epoch {epoch}, batch {batch_index} (loss={loss})",
            error_code="DIVERGENCE",
            details={"epoch": epoch, "batch": batch_index, "loss": loss}
        )


class GradientCheckError(JetNormalsError):
    """Raised when backward gradients disagree with finite differences"""

    def __init__(self, max_relative_error: float, tolerance: float, array: Optional[str] = None):
        self.max_relative_error = max_relative_error
        self.tolerance = tolerance
        super().__init__(
            message=f"Gradient check failed: relative error {max_relative_error:.3g} "
                    f"exceeds {tolerance:.3g}" + (f" (worst array {array})" if array else ""),
            error_code="GRADCHECK_FAILED",
            details={"max_relative_error": max_relative_error, "tolerance": tolerance, "array": array}
        )
