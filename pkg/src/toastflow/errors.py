"""Exception hierarchy shared by every toastflow module."""


class ToastflowError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ToastflowError, ValueError):
    """An argument lies outside the operation's domain."""


class FormatError(ToastflowError, ValueError):
    """Malformed input data (files, tile records, rational strings)."""


class ParameterError(ToastflowError, ValueError):
    """Incompatible generator or tiling parameters."""


class InfeasibleInputError(DomainError):
    """A combinatorial subroutine was asked for something that cannot exist."""


class UnsupportedInstanceError(DomainError):
    """The operation is only defined for grid/torus graphs."""


class RefusalError(ToastflowError):
    """A brute-force routine refused an instance above its size guard."""


class RoundingFailure(ToastflowError):
    """Certified failure of the rounding algorithm.

    Carries enough state to reproduce the failure: the tile being processed,
    the edge (if any) that could not be handled and a snapshot of the flow.
    """

    def __init__(self, message, *, tile=None, edge=None, flow=None):
        super().__init__(message)
        self.tile = tile
        self.edge = edge
        self.flow = flow


class EquidecompositionInfeasible(DomainError):
    """The tile-level transfer precondition failed for some tile."""

    def __init__(self, message, *, tile=None):
        super().__init__(message)
        self.tile = tile
