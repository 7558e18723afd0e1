"""
异常定义
Exception hierarchy for the flag-coordinate kernel.

Every error raised by the library derives from :class:`FlagCoordsError`, so the
CLI can map the whole family to exit code 1 while I/O problems
(:class:`FileFormatError`) map to exit code 2.
"""

from typing import Optional


class FlagCoordsError(Exception):
    """Root of the library's exceptions."""


class ConfigurationError(FlagCoordsError):
    """Bad tolerance or run configuration."""


class FileFormatError(FlagCoordsError):
    """Unreadable or schema-violating input file."""

    def __init__(self, path: str, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        self.path = path
        self.line = line
        self.column = column
        where = f" at line {line} column {column}" if line is not None else ""
        super().__init__(f"{path}{where}: {message}")


# -- geometry ---------------------------------------------------------------

class GeometryError(FlagCoordsError):
    pass


class NotHermitian(GeometryError):
    pass


class DegenerateBasis(GeometryError):
    pass


class NotInteriorPoint(GeometryError):
    pass


class OrthogonalLines(GeometryError):
    pass


class AsymptoticLines(GeometryError):
    pass


class PointNotOnLine(GeometryError):
    pass


class PointOnLine(GeometryError):
    pass


class ConcyclicPoints(GeometryError):
    pass


class NotAnIsometry(GeometryError):
    pass


# -- genericity -------------------------------------------------------------

class GenericityError(FlagCoordsError):
    """A configuration violates one of the genericity conditions."""

    def __init__(self, reason: str, message: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {message}" if message else reason)


class NonGenericPair(GenericityError):
    pass


class NonGenericTriple(GenericityError):
    def __init__(self, reason: str, message: str = "", face: Optional[int] = None):
        self.face = face
        if face is not None:
            message = f"face {face}: {message}" if message else f"face {face}"
        super().__init__(reason, message)


class DegenerateTriple(GenericityError):
    pass


# -- invariants -------------------------------------------------------------

class InvariantError(FlagCoordsError):
    pass


class InvalidInvariants(InvariantError):
    def __init__(self, constraint: str, message: str = ""):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}" if message else constraint)


class InvalidM(InvariantError):
    pass


# -- combinatorics ----------------------------------------------------------

class ComplexError(FlagCoordsError):
    pass


class InvalidComplex(ComplexError):
    def __init__(self, message: str, slot: Optional[tuple] = None):
        self.slot = slot
        super().__init__(f"slot {slot}: {message}" if slot is not None else message)


class WrongTriangulation(ComplexError):
    pass


class DisconnectedPath(ComplexError):
    pass


class UnsupportedSurface(ComplexError):
    pass


# -- decorations ------------------------------------------------------------

class DecorationError(FlagCoordsError):
    pass


class IncompatibleDecoration(DecorationError):
    def __init__(self, edge: int, residual: float):
        self.edge = edge
        self.residual = residual
        super().__init__(f"edge {edge}: m disagrees across the gluing (residual {residual:.3e})")


class InvalidDecoration(DecorationError):
    pass


class RelationViolation(DecorationError):
    def __init__(self, residual: float, threshold: float):
        self.residual = residual
        self.threshold = threshold
        super().__init__(f"relation residual {residual:.3e} exceeds {threshold:.1e}")


# -- solver -----------------------------------------------------------------

class SolverError(FlagCoordsError):
    pass


class DegenerateInput(SolverError):
    def __init__(self, message: str, face: Optional[int] = None):
        self.face = face
        super().__init__(f"face {face}: {message}" if face is not None else message)


class NoAdmissibleSolution(SolverError):
    def __init__(self, message: str, face: Optional[int] = None):
        self.face = face
        super().__init__(f"face {face}: {message}" if face is not None else message)


class RetryCapExhausted(FlagCoordsError):
    """Rejection sampling gave up before every gate passed."""

    def __init__(self, attempts: int, what: str):
        self.attempts = attempts
        super().__init__(f"no {what} passed the genericity gates after {attempts} attempts")
