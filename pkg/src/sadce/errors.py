"""Exception types shared across the estimator stages.

``ValueError`` is reserved for caller mistakes (bad geometry, size gates,
malformed configs).  ``EstimationError`` subclasses mark data-dependent
failures that a Monte Carlo harness records as failed trials instead of
aborting the run.
"""


class EstimationError(Exception):
    """Data-dependent failure of an estimation stage."""


class DegenerateInputError(EstimationError):
    """Input carries no usable signal (e.g. an all-zero channel estimate)."""


class ConditioningError(EstimationError):
    """A solve is too ill-conditioned to trust (e.g. vanishing phase reference)."""


class FitFailureError(EstimationError):
    """A parameter fit produced a physically invalid value (e.g. range <= 0)."""


class ConfigError(ValueError):
    """An experiment configuration violates its invariants."""
