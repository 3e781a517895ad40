"""Extraction manifest: a JSON config naming model, data, layer, outputs.

Example:

    {
      "model": "model.pt",
      "images": "test_images.fvec",
      "labels": "test_labels.lvec",
      "layer": "penultimate",
      "perturbation": {"kind": "fgsm", "step": 0.05},
      "seed": 7,
      "outputs": {
        "features": "features.fvec",
        "softmax": "softmax.fvec",
        "labels": "labels.lvec",
        "predictions": "predictions.lvec",
        "correctness": "correctness.lvec",
        "pixels": "pixels_adv.fvec"
      }
    }

`model` may be null for layer "pixel" with perturbation "none" (images are
passed through flattened; no forward pass is needed unless predictions,
softmax, or correctness outputs are requested). `images` is an FVEC file or
a CSV of rows of [0, 1] intensities, flattened row-major with channels
interleaved last. Every key in `outputs` is optional; only named files are
written, and all written files are row-aligned.
"""

from __future__ import annotations

import dataclasses
import json
import os

from .errors import ManifestError, PerturbationError

LAYERS = ("pixel", "penultimate", "softmax")
OUTPUT_KEYS = ("features", "softmax", "labels", "predictions",
               "correctness", "pixels")


@dataclasses.dataclass(frozen=True)
class Perturbation:
    kind: str  # "none" | "fgsm"
    step: float = 0.0


@dataclasses.dataclass(frozen=True)
class Manifest:
    images: str
    labels: str
    layer: str
    outputs: dict
    model: str | None = None
    perturbation: Perturbation = Perturbation("none")
    seed: int = 0
    batch_size: int = 256


def _resolve(base_dir, path):
    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def load_manifest(path) -> Manifest:
    try:
        with open(path) as f:
            raw = json.load(f)
    except OSError as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ManifestError(f"{path}: manifest must be a JSON object")

    for key in ("images", "labels", "layer", "outputs"):
        if key not in raw:
            raise ManifestError(f"{path}: missing required key {key!r}")
    layer = raw["layer"]
    if layer not in LAYERS:
        raise ManifestError(
            f"{path}: layer must be one of {LAYERS}, got {layer!r}")

    outputs = raw["outputs"]
    if not isinstance(outputs, dict) or not outputs:
        raise ManifestError(f"{path}: outputs must be a non-empty object")
    unknown = set(outputs) - set(OUTPUT_KEYS)
    if unknown:
        raise ManifestError(
            f"{path}: unknown output keys {sorted(unknown)}")

    pert_raw = raw.get("perturbation", {"kind": "none"})
    kind = pert_raw.get("kind", "none")
    if kind == "none":
        pert = Perturbation("none")
    elif kind == "fgsm":
        step = float(pert_raw.get("step", -1.0))
        if step < 0.0:
            raise PerturbationError(
                f"{path}: fgsm step must be >= 0, got {step}")
        pert = Perturbation("fgsm", step)
    else:
        raise ManifestError(f"{path}: unknown perturbation kind {kind!r}")

    base_dir = os.path.dirname(os.path.abspath(path))
    model = raw.get("model")
    needs_model = (layer != "pixel" or kind == "fgsm" or any(
        k in outputs for k in ("softmax", "predictions", "correctness")))
    if model is None and needs_model:
        raise ManifestError(
            f"{path}: a model is required for this layer/outputs/perturbation")

    return Manifest(
        images=_resolve(base_dir, raw["images"]),
        labels=_resolve(base_dir, raw["labels"]),
        layer=layer,
        outputs={k: _resolve(base_dir, v) for k, v in outputs.items()},
        model=None if model is None else _resolve(base_dir, model),
        perturbation=pert,
        seed=int(raw.get("seed", 0)),
        batch_size=int(raw.get("batch_size", 256)),
    )
