"""
Exception hierarchy shared by all SVDA modules.

Each class carries the process exit code the command line maps it to.
"""


class SVDAError(Exception):
    """Base error with optional time-step and pipeline-stage tags."""

    exit_code = 1

    def __init__(self, message, step=None, stage=None):
        super().__init__(message)
        self.message = message
        self.step = step
        self.stage = stage

    def __str__(self):
        parts = []
        if self.stage is not None:
            parts.append(f"[{self.stage}]")
        if self.step is not None:
            parts.append(f"step {self.step}:")
        parts.append(self.message)
        return " ".join(parts)


class ConfigError(SVDAError):
    exit_code = 2

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ReportError(SVDAError):
    exit_code = 2


class SolverError(SVDAError):
    exit_code = 3


class NonConvergence(SolverError):
    pass


class NonPhysical(SolverError):
    pass


class SingularGram(SolverError):
    pass


class PatchOutsideDomain(SolverError):
    pass


class RankDeficient(SolverError):
    pass


class SingularProjectionGram(SolverError):
    pass


class StabilityViolation(SolverError):
    pass


class SingularKKT(SolverError):
    pass


class DimensionMismatch(SolverError):
    pass


class OutOfOrderRequest(SolverError):
    pass


class TrainingError(SVDAError):
    exit_code = 4


class DivergedLoss(TrainingError):
    pass


class LookbackTooLarge(TrainingError):
    pass


class BoundViolated(SVDAError):
    exit_code = 5


class FormatError(SVDAError):
    """Malformed field, series or checkpoint file."""

    exit_code = 2
