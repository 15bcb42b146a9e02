"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ``InputError`` -> 3, ``EstimationError``
and its subclasses -> 4, anything else -> 5.
"""


class ErgmkitError(Exception):
    """Base class for all package-specific errors."""


class InputError(ErgmkitError):
    """Malformed files, unknown configuration keys, bad parameter values."""


class MissingAttribute(InputError):
    """A model term references a node attribute that was never provided."""


class EstimationError(ErgmkitError):
    """Base class for estimation failures."""


class SeparationDiverged(EstimationError):
    """A logistic fit diverged: a term perfectly predicts tie status."""


class NonConvergence(EstimationError):
    """An optimizer exhausted its iteration or round budget."""


class DegenerateSample(EstimationError):
    """All simulated statistics are identical; the model is likely degenerate."""


class BaseFitFailed(EstimationError):
    """The fit on the observed network failed, so no bootstrap can start."""


class TooManyReplicateFailures(EstimationError):
    """More than the tolerated fraction of bootstrap replicates failed to refit."""
