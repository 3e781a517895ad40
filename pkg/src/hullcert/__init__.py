"""Convex-hull based uncertainty scoring for learned models.

Approximates the convex hull of a training set with a sparse point set and
an epsilon margin, scores unseen samples by their normalized hull distance
(to-hull uncertainty), summarizes test sets by closure ratio, and provides
the comparison metrics and evaluation harnesses built on top.
"""

from .backend import BACKEND_NAME
from .errors import HullcertError
from .evaluation import (DetectionReport, LogisticModel1D, correlation_report,
                         detect_adversarial, fit_logistic_1d,
                         prioritize_top_fraction)
from .formats import (read_fvec, read_hull, read_lvec, read_matrix,
                      write_fvec, write_hull, write_lvec)
from .geometry import (BuildStats, HullApprox, Projection,
                       build_hull_approximation, compute_epsilon,
                       distance_to_hull, hull_distances, is_closure,
                       project_to_hull)
from .metrics import (SetSummary, closure_ratio, combined_metric, deep_gini,
                      dsa, pearson, point_biserial, to_hull_uncertainty)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME", "HullcertError", "HullApprox", "Projection", "BuildStats",
    "SetSummary", "DetectionReport", "LogisticModel1D",
    "compute_epsilon", "project_to_hull", "distance_to_hull",
    "build_hull_approximation", "is_closure", "hull_distances",
    "to_hull_uncertainty", "closure_ratio", "deep_gini", "dsa",
    "combined_metric", "pearson", "point_biserial",
    "fit_logistic_1d", "detect_adversarial", "correlation_report",
    "prioritize_top_fraction",
    "read_fvec", "write_fvec", "read_lvec", "write_lvec",
    "read_hull", "write_hull", "read_matrix",
]
