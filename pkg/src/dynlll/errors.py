"""Exception hierarchy.

ProtocolError covers adversary contract breaches (exit code 1 in the CLI),
InternalError covers engine/application invariant failures (exit code 2).
"""


class DynLLLError(Exception):
    pass


class ProtocolError(DynLLLError):
    """The update source violated a promise it was required to keep."""


class DuplicateFlaw(ProtocolError):
    pass


class UnknownFlaw(ProtocolError):
    pass


class UnknownClause(ProtocolError):
    pass


class DuplicateVariableInClause(ProtocolError):
    pass


class BoundedDependenceViolated(ProtocolError):
    pass


class EdgeExists(ProtocolError):
    pass


class UnknownEdge(ProtocolError):
    pass


class DegreeCapExceeded(ProtocolError):
    pass


class TriangleCreated(ProtocolError):
    pass


class AdversaryProtocolBreach(ProtocolError):
    pass


class InternalError(DynLLLError):
    """An invariant the implementation must maintain was broken."""


class StepBudgetExceeded(InternalError):
    pass


class FlawNotPresent(InternalError):
    pass


class NoColorAvailable(InternalError):
    pass


class MalformedTrace(InternalError):
    pass


class InconsistentForest(InternalError):
    pass


class BudgetExceeded(DynLLLError):
    """An exact-enumeration oracle was asked for more than its budget."""


class NeighborhoodTooLarge(BudgetExceeded):
    pass


class GenerationStalled(DynLLLError):
    pass


class DegenerateParameter(DynLLLError):
    pass


class StreamParseError(DynLLLError):
    """Malformed update-stream or config file (exit code 3 in the CLI)."""
