"""
Exception hierarchy
====================

Library code raises these; only ``fault_complex.cli.main`` turns them into
process exit codes. Each class carries its own ``exit_code``.
"""

from typing import Any, Dict, List, Optional, Tuple


class FaultComplexError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1


class SpecError(FaultComplexError, ValueError):
    """Malformed code/repetition strings, invalid configs or parameters."""

    exit_code = 2


class SubsystemPreconditionError(SpecError):
    """One or more subsystem-assembly preconditions failed."""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvalidComplexError(FaultComplexError):
    """A chain complex violates a dimension or chain condition."""

    exit_code = 3

    def __init__(self, message: str, location: Optional[Tuple[int, int, int]] = None):
        self.location = location
        super().__init__(message)


class InconsistentComplexError(InvalidComplexError):
    """Quotient precondition violated: image not contained in the kernel span."""


class DecoderInconsistencyError(FaultComplexError):
    """The syndrome handed to OSD is not in the image of the check matrix."""

    exit_code = 4

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)

    def with_context(self, **context: Any) -> "DecoderInconsistencyError":
        self.diagnostics.update(context)
        return self

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v}" for k, v in sorted(self.diagnostics.items()))
        return f"{base} ({details})"


class FitDataError(FaultComplexError):
    """Threshold-fit input is insufficient or degenerate."""

    exit_code = 5


class FitConvergenceError(FitDataError):
    """No optimizer start converged."""


def exit_code_for(exc: BaseException) -> int:
    """Exit code for an exception, 1 for anything outside the hierarchy."""
    if isinstance(exc, FaultComplexError):
        return exc.exit_code
    return 1
