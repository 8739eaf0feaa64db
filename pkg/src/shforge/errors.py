"""Exception types shared across the package."""

from __future__ import annotations


class BudgetExceeded(RuntimeError):
    """An enumeration or search would exceed its configured budget.

    ``best`` carries whatever partial result the caller could salvage
    (e.g. the best lower bound found by a search), or ``None``.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class NotFreeError(ValueError):
    """Input hypergraph violates a required freeness or linearity property."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class VectorSearchError(RuntimeError):
    """No evaluation vector passed verification within the try budget."""

    def __init__(self, message: str, tries: int):
        super().__init__(message)
        self.tries = tries


class CertificateError(RuntimeError):
    """A counting identity that must hold for every free input failed.

    Raised only on inputs already verified free, so it indicates a bug.
    """

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate
