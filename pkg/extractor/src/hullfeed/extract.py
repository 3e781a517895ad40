"""Run a manifest: forward a model over images, emit FVEC/LVEC outputs.

Model contract: a TorchScript module saved with torch.jit.save that maps a
float32 batch of flattened images (N, D) to a pair (features, logits),
where features is the penultimate activation matrix (input of the softmax
layer) and logits are the pre-softmax class scores. Pixel-layer manifests
with no prediction outputs and no perturbation need no model at all.
"""

from __future__ import annotations

import numpy as np
import torch
import torch.nn.functional as F

from . import formats
from .errors import DataError, ModelError
from .manifest import Manifest


def _load_images(path) -> np.ndarray:
    if path.endswith(".csv"):
        try:
            arr = np.loadtxt(path, delimiter=",", dtype=np.float32, ndmin=2)
        except (OSError, ValueError) as exc:
            raise DataError(f"{path}: {exc}") from exc
    else:
        arr = formats.read_fvec(path)
    if not np.isfinite(arr).all():
        raise DataError(f"{path}: non-finite pixel values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise DataError(f"{path}: pixel values must lie in [0, 1]")
    return np.ascontiguousarray(arr, dtype=np.float32)


def load_model(path) -> torch.jit.ScriptModule:
    try:
        model = torch.jit.load(path, map_location="cpu")
    except (OSError, RuntimeError, ValueError) as exc:
        raise ModelError(f"{path}: cannot load TorchScript model: {exc}") from exc
    model.eval()
    return model


def _forward(model, x: torch.Tensor):
    out = model(x)
    if not (isinstance(out, (tuple, list)) and len(out) == 2):
        raise ModelError(
            "model must return a (features, logits) pair, got "
            f"{type(out).__name__}")
    features, logits = out
    if features.ndim != 2 or logits.ndim != 2 or \
            features.shape[0] != x.shape[0] or logits.shape[0] != x.shape[0]:
        raise ModelError(
            "model outputs must be 2-D and row-aligned with the input batch")
    return features, logits


def fgsm_perturb(model, images: torch.Tensor, labels: torch.Tensor,
                 step: float, batch_size: int) -> torch.Tensor:
    """x' = clip(x + step * sign(grad_x cross_entropy(model(x), y)), 0, 1)."""
    out = torch.empty_like(images)
    for lo in range(0, images.shape[0], batch_size):
        xb = images[lo:lo + batch_size].clone().requires_grad_(True)
        _, logits = _forward(model, xb)
        loss = F.cross_entropy(logits, labels[lo:lo + batch_size])
        try:
            (grad,) = torch.autograd.grad(loss, xb)
        except RuntimeError as exc:
            raise ModelError(f"model is not differentiable: {exc}") from exc
        with torch.no_grad():
            out[lo:lo + batch_size] = torch.clamp(
                xb + step * torch.sign(grad), 0.0, 1.0)
    return out


def run(manifest: Manifest) -> dict:
    """Execute the manifest; returns {output key: written path}."""
    images = _load_images(manifest.images)
    labels = formats.read_lvec(manifest.labels)
    if labels.shape[0] != images.shape[0]:
        raise DataError(
            f"{manifest.labels}: {labels.shape[0]} labels for "
            f"{images.shape[0]} images")

    torch.manual_seed(manifest.seed)
    model = load_model(manifest.model) if manifest.model is not None else None
    x = torch.from_numpy(images)
    y = torch.from_numpy(labels)

    if manifest.perturbation.kind == "fgsm":
        x = fgsm_perturb(model, x, y, manifest.perturbation.step,
                         manifest.batch_size)
    pixels = x.numpy()

    features = softmax = predictions = None
    if model is not None:
        feat_parts, prob_parts, pred_parts = [], [], []
        with torch.no_grad():
            for lo in range(0, x.shape[0], manifest.batch_size):
                fb, lb = _forward(model, x[lo:lo + manifest.batch_size])
                feat_parts.append(fb.numpy())
                prob_parts.append(F.softmax(lb, dim=1).numpy())
                pred_parts.append(lb.argmax(dim=1).numpy())
        features = np.concatenate(feat_parts)
        softmax = np.concatenate(prob_parts)
        predictions = np.concatenate(pred_parts)

    if manifest.layer == "pixel":
        layer_matrix = pixels
    elif manifest.layer == "penultimate":
        layer_matrix = features
    else:
        layer_matrix = softmax

    written = {}
    for key, path in manifest.outputs.items():
        if key == "features":
            formats.write_fvec(path, layer_matrix)
        elif key == "softmax":
            formats.write_fvec(path, softmax)
        elif key == "pixels":
            formats.write_fvec(path, pixels)
        elif key == "labels":
            formats.write_lvec(path, labels)
        elif key == "predictions":
            formats.write_lvec(path, predictions)
        elif key == "correctness":
            formats.write_lvec(path, (predictions == labels).astype(np.int32))
        written[key] = path
    return written
