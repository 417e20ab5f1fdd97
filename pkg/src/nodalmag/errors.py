"""Exception hierarchy.

Every domain error derives from :class:`NodalMagError` so the CLI can map
them onto exit status 1 with a structured message.
"""


class NodalMagError(Exception):
    """Base class for all domain errors."""


class GraphError(NodalMagError, ValueError):
    """Invalid graph input.

    ``location`` is filled in by file parsers so errors point back into the
    offending document (e.g. ``"triangle.json: edges[2]"``).
    """

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)

    def at(self, location):
        """Return a copy of this error tagged with ``location``."""
        msg = str(self)
        if self.location:
            msg = msg[len(self.location) + 2:]
        return type(self)(msg, location=location)


class LoopEdge(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class Disconnected(GraphError):
    pass


class DimensionMismatch(GraphError):
    pass


class VertexOutOfRange(GraphError):
    pass


class ParseError(GraphError):
    pass


class GammaZeroOrInfinite(NodalMagError, ValueError):
    pass


class RequestedEdgeNotSurplus(NodalMagError, ValueError):
    pass


class InfeasibleBeta(NodalMagError, ValueError):
    pass


class ConvergenceFailure(NodalMagError, ArithmeticError):
    pass


class DegenerateEigenvalue(NodalMagError, ArithmeticError):
    pass


class NonGenericLevel(NodalMagError, ArithmeticError):
    """Level is degenerate or its eigenvector vanishes at a vertex."""


class VanishingEntry(NodalMagError, ArithmeticError):
    def __init__(self, vertex, value):
        self.vertex = vertex
        self.value = value
        super().__init__(f"eigenvector vanishes at vertex {vertex} (|f| = {abs(value):.3e})")
