"""Experimental harnesses: score-based adversarial detection with a 1-D
logistic classifier, correlation reporting, and top-fraction test
prioritization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (HullcertError, InsufficientSamples, InvalidFraction,
                     SingleGroup)
from .metrics import _labels, _scores, pearson, point_biserial

LOGISTIC_LR = 0.1
LOGISTIC_ITERS = 5000


@dataclass(frozen=True)
class LogisticModel1D:
    """sigma(weight * score + bias) classifier on a single score axis."""

    weight: float
    bias: float
    training_loss: float

    def predict_proba(self, scores) -> np.ndarray:
        s = np.asarray(scores, dtype=np.float64)
        return 1.0 / (1.0 + np.exp(-(self.weight * s + self.bias)))

    def predict(self, scores) -> np.ndarray:
        return (self.predict_proba(scores) >= 0.5).astype(np.int64)


@dataclass(frozen=True)
class DetectionReport:
    accuracy: float
    n_train_per_class: int
    n_eval_per_class: int
    seed: int
    metric_name: str


def fit_logistic_1d(scores, labels, max_iters: int = LOGISTIC_ITERS,
                    lr: float = LOGISTIC_LR) -> LogisticModel1D:
    """Full-batch gradient descent on the mean logistic loss.

    Deterministic given inputs and hyperparameters; the 1-D problem is
    convex, so these defaults converge on any desk-scale input.
    """
    s = _scores(scores, "scores")
    y = _labels(labels, "labels").astype(np.float64)
    if s.size != y.size:
        raise HullcertError(f"lengths differ: {s.size} != {y.size}")
    if len(np.unique(y)) < 2:
        raise SingleGroup("labels contain a single class")

    w, b = 0.0, 0.0
    n = s.size
    for _ in range(max_iters):
        z = w * s + b
        p = 1.0 / (1.0 + np.exp(-z))
        err = p - y
        gw = float(err @ s) / n
        gb = float(err.sum()) / n
        w -= lr * gw
        b -= lr * gb
    z = w * s + b
    # numerically stable mean logistic loss
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    return LogisticModel1D(weight=w, bias=b, training_loss=loss)


def detect_adversarial(clean_scores, adv_scores, n_train_per_class: int,
                       seed: int, metric_name: str = "metric") -> DetectionReport:
    """Fit a logistic detector on sampled scores, report held-out accuracy.

    A PCG64 generator seeded with the given 64-bit seed draws
    n_train_per_class samples without replacement from each score set
    (clean = 0, adversarial = 1); the detector is fit on those, z-scored
    with fit-split statistics, and evaluated on all remaining samples.
    """
    clean = _scores(clean_scores, "clean_scores")
    adv = _scores(adv_scores, "adv_scores")
    if n_train_per_class < 1:
        raise InsufficientSamples("n_train_per_class must be >= 1")
    if clean.size <= n_train_per_class or adv.size <= n_train_per_class:
        raise InsufficientSamples(
            f"each score set needs more than {n_train_per_class} samples "
            f"(got {clean.size} clean, {adv.size} adversarial)")

    rng = np.random.Generator(np.random.PCG64(np.uint64(seed)))
    idx_c = rng.choice(clean.size, size=n_train_per_class, replace=False)
    idx_a = rng.choice(adv.size, size=n_train_per_class, replace=False)

    fit_s = np.concatenate([clean[idx_c], adv[idx_a]])
    fit_y = np.concatenate([np.zeros(n_train_per_class, dtype=np.int64),
                            np.ones(n_train_per_class, dtype=np.int64)])

    mu = float(fit_s.mean())
    sd = float(fit_s.std())
    if sd == 0.0:
        sd = 1.0
    model = fit_logistic_1d((fit_s - mu) / sd, fit_y)

    mask_c = np.ones(clean.size, dtype=bool)
    mask_c[idx_c] = False
    mask_a = np.ones(adv.size, dtype=bool)
    mask_a[idx_a] = False
    eval_s = np.concatenate([clean[mask_c], adv[mask_a]])
    eval_y = np.concatenate([np.zeros(int(mask_c.sum()), dtype=np.int64),
                             np.ones(int(mask_a.sum()), dtype=np.int64)])

    pred = model.predict((eval_s - mu) / sd)
    accuracy = float((pred == eval_y).mean())
    n_eval = min(int(mask_c.sum()), int(mask_a.sum()))
    return DetectionReport(accuracy=accuracy, n_train_per_class=n_train_per_class,
                           n_eval_per_class=n_eval, seed=seed,
                           metric_name=metric_name)


def correlation_report(metric, other, correctness) -> dict:
    """Pearson against another metric plus point-biserial against a 0/1
    correctness vector, degenerate inputs surfaced as error strings."""
    out: dict = {"pearson": None, "pearson_error": None,
                 "point_biserial": None, "point_biserial_error": None}
    try:
        out["pearson"] = pearson(metric, other)
    except HullcertError as exc:
        out["pearson_error"] = str(exc)
    try:
        out["point_biserial"] = point_biserial(metric, correctness)
    except HullcertError as exc:
        out["point_biserial_error"] = str(exc)
    return out


def prioritize_top_fraction(scores, fraction: float) -> list[int]:
    """Indices of the ceil(fraction * n) highest scores, descending.

    Ties break toward the lower index; the output depends only on the
    score ordering, so any strictly increasing transform leaves it
    unchanged.
    """
    s = _scores(scores, "scores")
    if not (0.0 < fraction <= 1.0):
        raise InvalidFraction(f"fraction must be in (0, 1], got {fraction}")
    k = int(np.ceil(fraction * s.size))
    order = sorted(range(s.size), key=lambda i: (-s[i], i))
    return order[:k]
