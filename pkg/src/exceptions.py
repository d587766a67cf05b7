"""
Error types raised by the surgery toolkit.
"""
from typing import Any, Optional, Tuple


class SurgeryError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionMismatchError(SurgeryError, ValueError):
    """Operands have incompatible sizes."""

    def __init__(self, what: str, expected: Any, actual: Any):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected {expected}, got {actual}")


class MatrixFormatError(SurgeryError, ValueError):
    """Matrix text could not be parsed."""

    def __init__(self, message: str, source: str = "<text>", line: Optional[int] = None):
        self.source = source
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


class CssViolationError(SurgeryError, ValueError):
    """An X check and a Z check overlap on an odd number of qubits."""

    def __init__(self, x_check: int, z_check: int):
        self.pair = (x_check, z_check)
        super().__init__(
            f"CSS violation: X check {x_check} anticommutes with Z check {z_check}"
        )


class IncompatibleRepresentativesError(SurgeryError, ValueError):
    """Two representatives act with different non-identity letters on one qubit."""

    def __init__(self, qubit: int, pair: Tuple[int, int], letters: Tuple[str, str]):
        self.qubit = qubit
        self.pair = pair
        self.letters = letters
        super().__init__(
            f"representatives {pair[0]} and {pair[1]} act as {letters[0]} and "
            f"{letters[1]} on qubit {qubit}"
        )


class UncleanableError(SurgeryError, ValueError):
    """Cleaning is impossible because the region contains an anticommuting logical."""

    def __init__(self, message: str, witness: Any = None):
        self.witness = witness
        super().__init__(f"uncleanable: {message}")


class NotALogicalError(SurgeryError, ValueError):
    """Target operator is a stabilizer or fails to commute with the checks."""


class RequestModeError(SurgeryError, ValueError):
    """Measurement request violates the invariant of its mode."""

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None):
        self.pair = pair
        super().__init__(message)


class EigenSpecError(SurgeryError, ValueError):
    """Logical eigen-spec does not complete the checks to a full stabilizer set."""


class UnknownFaultError(SurgeryError, KeyError):
    """Fault id does not belong to the detector model."""

    def __init__(self, fault_id: str):
        self.fault_id = fault_id
        super().__init__(f"unknown fault id: {fault_id}")


class NonLogicalFaultError(SurgeryError, ValueError):
    """Fault set has a nonempty syndrome."""


class DesiderataError(SurgeryError, RuntimeError):
    """No auxiliary graph satisfying the desiderata was found within the retry budget."""

    def __init__(self, failed_items: Tuple[int, ...], attempts: int):
        self.failed_items = failed_items
        self.attempts = attempts
        items = ", ".join(str(i) for i in failed_items)
        super().__init__(f"desiderata items [{items}] failed after {attempts} attempts")


class CommutationAuditError(SurgeryError, RuntimeError):
    """Two checks of a deformed code anticommute."""

    def __init__(self, pair: Tuple[int, int]):
        self.pair = pair
        super().__init__(f"checks {pair[0]} and {pair[1]} anticommute")


class CertificationError(SurgeryError, RuntimeError):
    """A certified property does not hold."""

    def __init__(self, message: str, failed: Tuple[str, ...] = ()):
        self.failed = failed
        super().__init__(message)
