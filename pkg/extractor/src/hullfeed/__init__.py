"""hullfeed: produce FVEC/LVEC inputs for the hull toolkit from torch models."""

from .errors import (DataError, HullfeedError, ManifestError, ModelError,
                     PerturbationError)
from .extract import fgsm_perturb, load_model, run
from .formats import read_fvec, read_lvec, write_fvec, write_lvec
from .manifest import Manifest, Perturbation, load_manifest

__version__ = "0.1.0"

__all__ = [
    "DataError", "HullfeedError", "ManifestError", "ModelError",
    "PerturbationError", "Manifest", "Perturbation", "load_manifest",
    "fgsm_perturb", "load_model", "run",
    "read_fvec", "read_lvec", "write_fvec", "write_lvec",
    "__version__",
]
