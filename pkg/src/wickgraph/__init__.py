"""Time-ordered Gaussian moment integrals through labeled multigraphs."""

from .engine import EvaluationResult, Term, evaluate, expand_symbolic, fk_partial_sum
from .errors import GuardError, SamplingError, ValidationError, WickGraphError
from .graph import Multigraph, canonical_key, components, enumerate_graphs
from .factor import c_general, c_graph
from .kernel import CovarianceKernel
from .poly import Polynomial
from .quad import QuadratureRule

__all__ = [
    "CovarianceKernel",
    "EvaluationResult",
    "GuardError",
    "Multigraph",
    "Polynomial",
    "QuadratureRule",
    "SamplingError",
    "Term",
    "ValidationError",
    "WickGraphError",
    "c_general",
    "c_graph",
    "canonical_key",
    "components",
    "enumerate_graphs",
    "evaluate",
    "expand_symbolic",
    "fk_partial_sum",
]
