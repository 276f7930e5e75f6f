"""Exception and warning types raised across the pipeline."""


class FracHarmError(Exception):
    """Base class for all errors raised by fracharm."""

    exit_code = 2


class InputError(FracHarmError):
    exit_code = 1


class PlyFormatError(InputError):
    """Malformed or unsupported PLY content.

    ``position`` is a byte offset for binary payloads and a 1-based line
    number for headers and ASCII payloads; ``unit`` says which.
    """

    def __init__(self, message, position=None, unit="line"):
        self.position = position
        self.unit = unit
        if position is not None:
            message = f"{message} (at {unit} {position})"
        super().__init__(message)


class ConfigError(FracHarmError):
    exit_code = 3


class GeometryError(FracHarmError):
    """Point sampling too sparse or degenerate for the requested operation."""

    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"point {index}: {message}"
        super().__init__(message)


class DegenerateSamplingError(GeometryError):
    pass


class InsufficientNeighborsError(GeometryError):
    pass


class DegenerateNeighborhoodError(GeometryError):
    pass


class DuplicatePointError(GeometryError):
    pass


class NumericalError(FracHarmError):
    pass


class EigenSolverError(NumericalError):
    pass


class DefectiveOperatorError(NumericalError):
    pass


class OperatorMismatchError(FracHarmError):
    """Signal/operator/basis combination that was not produced together."""

    exit_code = 3


class BranchCutWarning(RuntimeWarning):
    """An eigenvalue sits on the negative real axis; principal value used."""


class ImaginaryResidueWarning(RuntimeWarning):
    """A transform that should land on real data left a large imaginary part."""
