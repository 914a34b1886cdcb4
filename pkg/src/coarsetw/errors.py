"""Exception hierarchy shared by every module."""

import os


class CoarseError(Exception):
    """Base class for all errors raised by coarsetw."""


class InputError(CoarseError, ValueError):
    """Malformed or out-of-range input (bad vertex id, invalid parameters, ...)."""


class BudgetExceeded(CoarseError):
    """An exact enumeration would exceed its configured budget."""

    def __init__(self, message, size=None, budget=None):
        super().__init__(message)
        self.size = size
        self.budget = budget


class InvariantViolation(CoarseError, AssertionError):
    """A proven bound or structural invariant failed at runtime.

    This signals an implementation bug (or an undershooting estimate), never a
    usage error. ``witness`` carries whatever pinpoints the failure.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DecompositionFailure(CoarseError):
    """The separator oracle found no (k, r)-coverable balanced separator in a frame."""

    def __init__(self, message, frame=None):
        super().__init__(message)
        self.frame = frame


class CapExceeded(DecompositionFailure):
    """A child cover in the round builder grew beyond ``gamma_cap``."""


DEFAULT_ENUMERATION_BUDGET = 10**7


def enumeration_budget(default=DEFAULT_ENUMERATION_BUDGET):
    """Budget for exact enumerations; ``COARSE_TW_BUDGET`` overrides it."""
    raw = os.environ.get("COARSE_TW_BUDGET")
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"COARSE_TW_BUDGET must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError("COARSE_TW_BUDGET must be positive")
    return value
