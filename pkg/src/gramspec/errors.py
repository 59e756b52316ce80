"""Exception hierarchy shared by the library and the CLI.

The CLI maps ``InputError`` to exit code 1 and ``NumericalError`` to exit
code 2; everything else is a bug.
"""


class GramspecError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GramspecError, ValueError):
    """Invalid arguments, shapes, file contents or parameter combinations."""

    exit_code = 1


class NumericalError(GramspecError, RuntimeError):
    """A numerical procedure failed or produced an unusable result."""

    exit_code = 2


class InfeasibleMomentsError(NumericalError):
    """The target power sums cannot be realized by nonnegative reals
    with uniform weights (complex or negative roots beyond tolerance)."""


class DegenerateMomentsError(NumericalError):
    """Moment matrix is not positive definite: the underlying measure has
    fewer distinct support points than the requested degree."""


class SolverFailureError(NumericalError):
    """The scaling-distribution solver could not produce a valid
    atoms/weights representation."""


class UnsupportedParityError(InputError):
    """Even subsample sizes are rejected: the construction is only
    implemented for odd k."""
