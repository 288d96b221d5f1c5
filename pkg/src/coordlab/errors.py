"""Exception hierarchy shared by every coordlab module."""


class CoordLabError(Exception):
    """Base class for all library errors."""


class InvalidGraph(CoordLabError, ValueError):
    """Adjacency data violates symmetry, loop-freeness or regularity."""


class InfeasibleDegree(CoordLabError, ValueError):
    """No K-regular graph on N vertices exists (need 2 <= K <= N-1 and N*K even)."""


class DegreeSaturated(CoordLabError, ValueError):
    """Augmenting would push the degree past N-1."""


class AugmentationNotFound(CoordLabError, RuntimeError):
    """The complement holds no edge-disjoint perfect matching / 2-factor we can use."""


class ConvergenceFailure(CoordLabError, RuntimeError):
    pass


class DimensionMismatch(CoordLabError, ValueError):
    pass


class VertexOutOfRange(CoordLabError, IndexError):
    pass


class TooLarge(CoordLabError, ValueError):
    """Exhaustive enumeration requested for N above the supported cap."""


class Disconnected(CoordLabError, ValueError):
    pass


class DegenerateTheta(CoordLabError, ValueError):
    """theta sits on the tie N/(2K); the optimal consensus profile is not unique."""


class RelaxationNotExact(CoordLabError, AssertionError):
    pass
