"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so the command-line
frontend does not need to know which module raised.
"""


class RankSetError(Exception):
    exit_code = 1


class DataError(RankSetError, ValueError):
    """Malformed input data or a violated type invariant."""

    exit_code = 3


class InfeasibleError(RankSetError, ValueError):
    """A request that cannot be met (population too small, hypothesis
    outside the support, degenerate statistic)."""

    exit_code = 4


class NumericalError(RankSetError, ArithmeticError):
    """A numerical routine failed to converge."""

    exit_code = 4
