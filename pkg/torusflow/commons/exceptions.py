"""Named failure modes of the package.

All exceptions derive from the built-in family they belong to (``ValueError`` for contract violations, ``ArithmeticError``
for numerical breakdowns), so that callers catching built-ins keep working. ``TorusflowError`` is a marker used by the
command line to tell package errors apart from programming errors.
"""

from typing import Optional


class TorusflowError(Exception):
    """Marker base class for all the errors raised on purpose by ``torusflow``."""

    numerical: bool = True  # Numerical failures exit with code 1, configuration failures with code 2


class ShapeMismatchError(TorusflowError, ValueError):
    """Two fields (or a field and an operator) disagree on dimension, truncation or component count."""

    numerical = False


class NonZeroMeanError(TorusflowError, ValueError):
    """The inverse laplacian was applied to a field whose mean mode is not negligible."""

    def __init__(self, mean: float, tolerance: float):
        self.mean = mean
        self.tolerance = tolerance
        super().__init__(f'Mean mode |f_0| = {mean:.3e} exceeds the zero-mean tolerance {tolerance:.3e}')


class InsufficientHistoryError(TorusflowError, ValueError):
    """The right-hand-side history does not cover the requested time grid."""

    numerical = False


class GridTooCoarseError(TorusflowError, ValueError):
    """The time grid is too coarse for a centered finite difference."""

    numerical = False


class TooFewModesError(TorusflowError, ValueError):
    """Not enough coefficient shells above the floor to fit a decay rate."""

    def __init__(self, shells: int, required: int):
        self.shells = shells
        self.required = required
        super().__init__(f'Only {shells} shells above floor, at least {required} are required')


class DegenerateTrajectoryError(TorusflowError, ValueError):
    """The trajectory is already constant, so there is no decay to measure."""


class MajorantSetupError(TorusflowError, ValueError):
    """The inputs of a majorant-calculus check do not satisfy its precondition."""

    numerical = False


class ConfigError(TorusflowError, ValueError):
    """A configuration, manifest or generator specification is invalid."""

    numerical = False

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f'{field}: {message}' if field else message)


class DivergedError(TorusflowError, ArithmeticError):
    """A Picard iteration left its contraction regime.

    Attributes:
        report: the ``PicardReport`` of the iterations performed before giving up.
    """

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)
