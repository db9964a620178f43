"""starpack: star-packing solvers, exact oracles and instance generators.

Heavy submodules (oracle with its jit kernel, plotting) are imported lazily
by the code that needs them; importing the package itself stays cheap.
"""

from .errors import (
    FootprintError,
    GraphParseError,
    InvalidPackingError,
    IterationLimitError,
    NodeBudgetError,
    NormalizationError,
    OracleSizeError,
)
from .graph import Graph, connected, parse_graph, serialize_graph
from .model import (
    KMT,
    KPLUS,
    SEQ,
    UNBOUNDED,
    Constraint,
    Packing,
    RunReport,
    Star,
    TraceEvent,
    parse_k,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Constraint",
    "FootprintError",
    "Graph",
    "GraphParseError",
    "InvalidPackingError",
    "IterationLimitError",
    "KMT",
    "KPLUS",
    "NodeBudgetError",
    "NormalizationError",
    "OracleSizeError",
    "Packing",
    "RunReport",
    "SEQ",
    "Star",
    "TraceEvent",
    "UNBOUNDED",
    "connected",
    "parse_graph",
    "parse_k",
    "serialize_graph",
    "validate",
    "__version__",
]
