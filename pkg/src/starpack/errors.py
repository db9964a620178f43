"""Exception types shared across the package.

Kept in one place so the CLI can map them onto exit codes without
importing every solver module.
"""


class GraphParseError(ValueError):
    """Raised when graph text input is malformed."""


class InvalidPackingError(ValueError):
    """Raised when a packing fails structural validation where a valid one is required."""


class IterationLimitError(RuntimeError):
    """A solver exceeded its iteration cap; indicates a progress-invariant bug."""


class NodeBudgetError(RuntimeError):
    """The exact branch-and-bound search exceeded its node budget."""


class OracleSizeError(ValueError):
    """Instance is larger than the exact oracle's configured limit."""


class FootprintError(ValueError):
    """A repack footprint exceeds the enumerable size limit."""


class NormalizationError(RuntimeError):
    """The coverage-preserving normalization walk found no admissible step."""
