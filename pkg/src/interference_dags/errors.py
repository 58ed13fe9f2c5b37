"""Exception hierarchy shared by every module of the package."""


class InterferenceDagError(Exception):
    """Base class for all domain errors raised by this package."""


# -- graphs ------------------------------------------------------------------

class DagError(InterferenceDagError):
    pass


class CycleDetected(DagError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("directed cycle: " + " -> ".join(self.cycle))


class DuplicateNode(DagError):
    pass


class DanglingEdge(DagError):
    pass


class UnknownNode(DagError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidNode(DagError):
    pass


class InvalidPath(DagError):
    pass


class OverlappingSets(DagError):
    pass


class PathLimitExceeded(DagError):
    pass


class DotSyntaxError(DagError):
    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


# -- identification ------------------------------------------------------------

class IdentificationError(InterferenceDagError):
    pass


class InadmissibleNode(IdentificationError):
    pass


class SearchLimitExceeded(IdentificationError):
    pass


# -- builders ------------------------------------------------------------------

class BuilderError(InterferenceDagError):
    pass


class InvalidSize(BuilderError):
    pass


class InvalidSpec(BuilderError):
    pass


# -- structural causal models --------------------------------------------------

class ScmError(InterferenceDagError):
    pass


class StateSpaceTooLarge(ScmError):
    pass


class DomainViolation(ScmError):
    pass


class OverlappingTargets(ScmError):
    pass


class ScmFormatError(ScmError):
    pass


# -- estimands -----------------------------------------------------------------

class EstimandError(InterferenceDagError):
    pass


class IncompleteSpec(EstimandError):
    pass


class PositivityViolation(EstimandError):
    def __init__(self, message, stratum=None):
        self.stratum = stratum
        super().__init__(message)
