"""Exception taxonomy for the extractor."""


class HullfeedError(Exception):
    """Base class for all extractor errors."""


class ManifestError(HullfeedError):
    """Manifest file missing, unparsable, or semantically invalid."""


class ModelError(HullfeedError):
    """Model file cannot be loaded or violates the (features, logits) contract."""


class DataError(HullfeedError):
    """Input images/labels missing, malformed, or misaligned."""


class PerturbationError(HullfeedError):
    """Invalid perturbation specification (e.g. negative FGSM step)."""
