"""Exception types shared across the package."""


class DiagramError(ValueError):
    """A diagram violates a structural invariant."""


class CapabilityError(ValueError):
    """Request exceeds a supported combinatorial bound (e.g. degree > 4)."""


class ClassificationError(ValueError):
    """A vertex subset does not define a valid codimension-1 face."""


class EmbeddingError(ValueError):
    """A curve fails the immersion/embedding validation; carries witnesses."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SamplingError(RuntimeError):
    """The configuration sampler could not produce a valid sample."""


class ConvergenceError(RuntimeError):
    """A Monte Carlo estimate failed a convergence or integrality check."""
