"""Graph states, their CP decompositions, rank bounds and entanglement measures."""

__version__ = "0.1.0"

from .errors import InputError, ResourceError, VerificationError
from .exact import ExactAmplitude, ExactVector
from .graph import Bipartition, Graph, complete, cut_rank, lc_orbit, line, ring, star
from .statevec import StateVector, build_graph_state, graph_basis_state
from .cpd import CPDecomposition, line_cpd, rank_bounds, reconstruct, ring_cpd, verify

__all__ = [
    "Bipartition",
    "CPDecomposition",
    "ExactAmplitude",
    "ExactVector",
    "Graph",
    "InputError",
    "ResourceError",
    "StateVector",
    "VerificationError",
    "build_graph_state",
    "complete",
    "cut_rank",
    "graph_basis_state",
    "lc_orbit",
    "line",
    "line_cpd",
    "rank_bounds",
    "reconstruct",
    "ring",
    "ring_cpd",
    "star",
    "verify",
]
