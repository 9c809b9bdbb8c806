"""Exception hierarchy.

Two families matter to callers: :class:`DataError` for bad input (the CLI
exits with 2) and :class:`NumericalError` for failures of the numerics
themselves (exit 3).
"""


class AntimodError(Exception):
    pass


class DataError(AntimodError, ValueError):
    pass


class NumericalError(AntimodError, ArithmeticError):
    pass


class EmptyGraph(DataError):
    """The graph has zero total volume, so modularity is undefined."""


class ZeroMeasure(DataError):
    """A node or node set has zero measure under the chosen policy."""


class DimensionMismatch(DataError):
    pass


class NonConformal(DimensionMismatch):
    """Block sizes do not match the matrix or vector being partitioned."""


class NotSymmetric(DataError):
    pass


class NotOrthonormal(DataError):
    pass


class RankBoundError(DataError):
    pass


class ProbabilityOutOfRange(DataError):
    pass


class ZeroNu(DataError):
    pass


class ZeroDelta(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class UnsupportedFormat(ParseError):
    pass


class ZeroMatrix(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, iterations, converged=0, wanted=0):
        self.iterations = iterations
        self.converged = converged
        self.wanted = wanted
        super().__init__(
            f"no convergence after {iterations} restarts "
            f"({converged}/{wanted} eigenpairs converged)"
        )


class InsufficientSpectrum(NumericalError):
    pass


class ZeroLeadingEigenvalue(NumericalError):
    pass
