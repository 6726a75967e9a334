"""Exception hierarchy shared by every pathlab module."""


class PathlabError(Exception):
    pass


# graph construction
class GraphError(PathlabError):
    pass


class NegativeWeight(GraphError):
    pass


class NodeOutOfRange(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class EmptyGraph(GraphError):
    pass


class GraphMismatch(GraphError):
    pass


# preprocessing
class InvalidConfig(PathlabError):
    pass


class TooManyPivots(PathlabError):
    pass


# file formats
class FormatError(PathlabError):
    pass


class MalformedHeader(FormatError):
    pass


class RowLengthMismatch(FormatError):
    pass


class UnknownGlyph(FormatError):
    pass


class MalformedEntry(FormatError):
    pass


# cli / bench
class ArtifactMismatch(PathlabError):
    pass


class CellBlocked(PathlabError):
    pass


class OptimalityMismatch(PathlabError):
    """Two heuristics disagreed on the optimal cost of an instance."""
