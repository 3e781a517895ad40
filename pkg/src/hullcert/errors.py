"""Exception hierarchy.

Data-shaped problems (bad files, degenerate inputs) all derive from
HullcertError so the CLI can map them to a single exit code.
"""


class HullcertError(Exception):
    """Base class for all toolkit errors."""


class DegenerateTrainingSet(HullcertError):
    """Training set has fewer than 2 rows or a zero epsilon margin."""


class DimensionMismatch(HullcertError):
    """Query / hull / matrix dimensions disagree."""


class NonConvergence(HullcertError):
    """Projection iteration cap hit before the duality-gap criterion.

    Only raised where a caller demands a converged result; batch paths
    carry the condition as a flag on the Projection instead.
    """


class EmptyInput(HullcertError):
    """An operation received an empty score or label vector."""


class InvalidDistribution(HullcertError):
    """A softmax row has negative entries or does not sum to 1."""


class MissingClass(HullcertError):
    """A predicted class has no training representatives."""


class DegenerateDenominator(HullcertError):
    """DSA denominator is zero (duplicate cross-class activations)."""


class LengthMismatch(HullcertError):
    """Paired vectors have different lengths."""


class ZeroVariance(HullcertError):
    """A correlation input has no variance."""


class SingleGroup(HullcertError):
    """A binary label vector contains only one group."""


class InsufficientSamples(HullcertError):
    """Not enough samples for the requested train/eval split."""


class InvalidFraction(HullcertError):
    """Selection fraction outside (0, 1]."""


class MalformedFile(HullcertError):
    """Bad magic, truncated payload, ragged CSV, or inconsistent header."""


class NonFiniteValue(HullcertError):
    """A NaN or infinity was found during ingestion or serialization."""


class IoFailure(HullcertError):
    """Underlying OS-level read/write failure."""
