"""Exception hierarchy shared across the package.

Agent indices stored on exceptions are 0-based; messages print them 1-based.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Invalid input to a graph, law or simulation."""


class GraphError(ValidationError):
    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class AsymmetricWeights(GraphError):
    pass


class NegativeWeight(GraphError):
    pass


class NonzeroDiagonal(GraphError):
    pass


class DisconnectedGraph(GraphError):
    pass


class ParamError(ValidationError):
    def __init__(self, message: str, agent: int | None = None):
        super().__init__(message)
        self.agent = agent


class SigmaOutOfRange(ParamError):
    pass


class XiOutOfRange(ParamError):
    pass


class NonpositiveBeta(ParamError):
    pass


class NonpositiveInternal0(ParamError):
    pass


class ThetaTooSmall(ParamError):
    def __init__(self, message: str, agent: int | None = None, bound: float | None = None):
        super().__init__(message, agent)
        self.bound = bound


class ParseError(ValueError):
    """Malformed experiment file. ``field`` is ``section.key`` when known."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if field:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.field = field
        self.line = line


class NumericalFailure(RuntimeError):
    pass


class NonpositiveInternal(NumericalFailure):
    """An internal triggering variable reached zero or below."""


class ZenoGuard(RuntimeError):
    """Too many consecutive sub-floor inter-event gaps for one agent.

    ``partial`` holds the :class:`~etconsensus.simulator.SimResult` recorded up
    to the abort so callers can still flush the event log.
    """

    def __init__(self, message: str, agent: int, time: float, partial=None):
        super().__init__(message)
        self.agent = agent
        self.time = time
        self.partial = partial
