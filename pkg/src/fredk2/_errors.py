"""Exception hierarchy shared by all modules.

Exit codes follow the CLI contract: 2 for bad input, 3 for numerical
failure, 4 for a violated internal invariant.
"""


class FredK2Error(Exception):
    """Base class; carries the process exit code for the CLI."""

    exit_code = 1


class InputError(FredK2Error):
    """Malformed or out-of-contract input (files, parameters, degrees)."""

    exit_code = 2


class NumericalError(FredK2Error):
    """Failure of a numerical procedure: singularities, band overflow,
    non-converging refinement."""

    exit_code = 3


class InvariantViolation(FredK2Error):
    """An internal consistency assertion failed, e.g. a nonzero symbol
    where a zero symbol is structurally required."""

    exit_code = 4
