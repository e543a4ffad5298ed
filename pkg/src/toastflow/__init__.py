"""Integral rounding of rational flows along connected toasts, with
equidecompositions of torus subsets built on top."""

from .errors import (
    DomainError,
    EquidecompositionInfeasible,
    FormatError,
    InfeasibleInputError,
    ParameterError,
    RefusalError,
    RoundingFailure,
    ToastflowError,
    UnsupportedInstanceError,
)
from .graph import Flow, FlowProblem, Graph, divergence, verify_f_flow
from .parity import cycle_decompose, odd_parity_subgraph
from .rationals import ExactRational, parse_rational
from .rounding import dyadic_round, integral_round, round_flow
from .toast import Tile, Toast, generate_torus_toast, is_k_toast, stratify, validate_toast

__version__ = "0.1.0"
