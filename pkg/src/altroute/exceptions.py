"""Exception hierarchy for altroute."""


class AltRouteError(Exception):
    """Base class for all altroute errors."""


class NoRoute(AltRouteError):
    """Target is not reachable from the source."""


class InvalidPath(AltRouteError):
    """A path does not meet the required endpoints or weight function."""


class MixedEndpoints(AltRouteError):
    """Alternative graphs with different source/target cannot be combined."""


class NodeNotInAG(AltRouteError):
    """Node queried against an alternative graph that does not contain it."""


class ZeroBaseDistance(AltRouteError):
    """Base shortest-path distance is zero, so normalized metrics are undefined."""


class NoCandidates(AltRouteError):
    """Selection was invoked with an empty candidate list."""


class LabelCapExceeded(AltRouteError):
    """Multi-criteria search hit its label budget.

    Carries the candidates decoded so far in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = list(partial or [])


class DataFormatError(AltRouteError):
    """Malformed input data; ``line`` is the 1-based offending line when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MalformedHeader(DataFormatError):
    """Graph file header or line structure is not valid."""


class ArcCountMismatch(DataFormatError):
    """Number of arc lines disagrees with the header."""


class NegativeWeight(DataFormatError):
    """An arc carries a negative weight."""


class IdOutOfRange(DataFormatError):
    """A node id falls outside the declared range."""


class MissingCoordinates(AltRouteError):
    """Export format needs node coordinates that the graph does not have."""


class DocumentError(DataFormatError):
    """Alternative-graph JSON document failed strict parsing."""
