"""
Fault Isolation Errors
======================

Exception hierarchy shared by every faultiso subpackage. Each exception
carries a stable ``code`` so pipeline summaries and the CLI can report
failures without parsing messages.
"""

from typing import Optional


class FaultIsolationError(Exception):
    """Base class for all faultiso errors"""

    code = "FAULTISO_ERROR"

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(message)
        self.message = message
        if code is not None:
            self.code = code

    def __str__(self):
        return f"{self.__class__.__name__} [{self.code}]: {self.message}"


class InvalidMatrix(FaultIsolationError):
    code = "INVALID_MATRIX"


class DimensionMismatch(FaultIsolationError):
    code = "DIMENSION_MISMATCH"


class InconsistentRankForms(FaultIsolationError):
    code = "INCONSISTENT_RANK_FORMS"


class ModelValidationError(FaultIsolationError):
    code = "MODEL_INVALID"


class InvalidScenario(FaultIsolationError):
    code = "SCENARIO_INVALID"


class InvalidSubset(FaultIsolationError):
    code = "OUTPUT_SUBSET_INVALID"


class InvalidChannel(FaultIsolationError):
    code = "CHANNEL_INVALID"


class WindowTooLong(FaultIsolationError):
    code = "WINDOW_TOO_LONG"


class WindowOutOfRange(FaultIsolationError):
    code = "WINDOW_OUT_OF_RANGE"


class NotPersistentlyExciting(FaultIsolationError):
    code = "NOT_PERSISTENTLY_EXCITING"


class OrderAmbiguous(FaultIsolationError):
    code = "ORDER_AMBIGUOUS"


class EmptyParitySpace(FaultIsolationError):
    code = "EMPTY_PARITY_SPACE"


class HorizonTooShort(FaultIsolationError):
    code = "HORIZON_TOO_SHORT"


class RankToleranceAmbiguous(FaultIsolationError):
    code = "RANK_TOLERANCE_AMBIGUOUS"


class NotLeftInvertible(FaultIsolationError):
    code = "NOT_LEFT_INVERTIBLE"


class NumericallyIllConditioned(FaultIsolationError):
    code = "ILL_CONDITIONED"


class ZeroDynamicsViolation(FaultIsolationError):
    code = "ZERO_DYNAMICS_VIOLATION"


class TheoremMismatch(FaultIsolationError):
    code = "THEOREM_MISMATCH"


class CombinationNotFound(FaultIsolationError):
    code = "COMBINATION_NOT_FOUND"


class ZeroSignalPower(FaultIsolationError):
    code = "ZERO_SIGNAL_POWER"


class ConfigValidationError(FaultIsolationError):
    """Raised when an experiment document fails validation"""

    code = "CONFIG_INVALID"

    def __init__(self, message: str, field_errors: Optional[dict] = None):
        super().__init__(message)
        self.field_errors = field_errors or {}


class PipelineStageError(FaultIsolationError):
    """Wraps any failure raised inside a named pipeline stage"""

    code = "PIPELINE_STAGE_FAILED"

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
