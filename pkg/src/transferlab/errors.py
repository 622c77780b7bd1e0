"""Semantic exception hierarchy.

Public functions raise these instead of bare ValueError/TypeError so callers
(and the CLI) can map failure classes to exit codes without string matching.
"""


class TransferLabError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(TransferLabError, ValueError):
    """Operands have incompatible lengths or table shapes."""


class DistributionError(TransferLabError, ValueError):
    """A vector or table violates the probability constraints."""


class SupportViolationError(TransferLabError, ValueError):
    """Absolute continuity fails where a divergence requires it."""


class InconsistentDataError(TransferLabError, ValueError):
    """Side information contradicts the dataset it claims to describe."""


class ProtocolError(TransferLabError, TypeError):
    """An estimator was offered less disclosure than its protocol needs."""


class InvalidInstanceError(TransferLabError, ValueError):
    """An adversarial-instance specification violates a burn-in bound."""


class TooLargeError(TransferLabError, ValueError):
    """A brute-force oracle guard was exceeded."""


class InsufficientDataError(TransferLabError, ValueError):
    """Not enough usable points for a requested regression."""
