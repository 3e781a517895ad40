"""Command-line interface.

Every subcommand emits one JSON report on stdout (or --out where the
grammar says so); exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import evaluation, formats, geometry, metrics, reports
from .errors import HullcertError

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _emit(report: dict, out_path: str | None) -> None:
    text = reports.render_report(report)
    if out_path:
        with open(out_path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _matrix_args(p: _Parser, flag: str) -> None:
    p.add_argument(flag, required=True, metavar="FILE")


def build_parser() -> _Parser:
    p = _Parser(prog="hullcert",
                description="Convex-hull based uncertainty scoring toolkit")
    p.add_argument("--format", choices=["fvec", "csv"], default=None,
                   help="matrix file format (default: by extension)")
    p.add_argument("--csv-header", action="store_true",
                   help="CSV matrices carry a single header row")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("epsilon", help="margin of a training matrix")
    _matrix_args(sp, "--train")
    sp.add_argument("--out")

    sp = sub.add_parser("build", help="build the hull approximation")
    _matrix_args(sp, "--train")
    sp.add_argument("--out", required=True, metavar="HULL")

    sp = sub.add_parser("tu", help="to-hull uncertainty of a test matrix")
    sp.add_argument("--hull", required=True)
    _matrix_args(sp, "--test")
    sp.add_argument("--out", required=True, metavar="CSV")

    sp = sub.add_parser("summary", help="closure ratio and mean exterior TU")
    sp.add_argument("--hull", required=True)
    _matrix_args(sp, "--test")
    sp.add_argument("--out")

    sp = sub.add_parser("gini", help="Gini impurity of softmax rows")
    _matrix_args(sp, "--softmax")
    sp.add_argument("--out", required=True, metavar="CSV")

    sp = sub.add_parser("dsa", help="distance surprise of test activations")
    _matrix_args(sp, "--train-act")
    sp.add_argument("--train-labels", required=True)
    _matrix_args(sp, "--test-act")
    sp.add_argument("--test-pred", required=True)
    sp.add_argument("--out", required=True, metavar="CSV")

    sp = sub.add_parser("combine", help="elementwise product of two score files")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--out", required=True, metavar="CSV")

    sp = sub.add_parser("detect", help="logistic adversarial detection harness")
    sp.add_argument("--clean", required=True)
    sp.add_argument("--adv", required=True)
    sp.add_argument("--train-n", required=True, type=int)
    sp.add_argument("--seed", required=True, type=int)
    sp.add_argument("--out")

    sp = sub.add_parser("correlate", help="Pearson + point-biserial report")
    sp.add_argument("--metric", required=True)
    sp.add_argument("--other", required=True)
    sp.add_argument("--correct", required=True, metavar="LVEC")
    sp.add_argument("--out")

    sp = sub.add_parser("select", help="indices of the top score fraction")
    sp.add_argument("--scores", required=True)
    sp.add_argument("--fraction", required=True, type=float)
    sp.add_argument("--out")

    return p


def _read_matrix(args, path):
    return formats.read_matrix(path, format=args.format, header=args.csv_header)


def _cmd_epsilon(args):
    X = _read_matrix(args, args.train)
    eps = geometry.compute_epsilon(X)
    _emit(reports.make_report("epsilon", {"epsilon": eps, "rows": X.shape[0],
                                          "cols": X.shape[1]},
                              inputs={"train": args.train}), args.out)


def _cmd_build(args):
    X = _read_matrix(args, args.train)
    hull = geometry.build_hull_approximation(X)
    formats.write_hull(hull, args.out)
    _emit(reports.make_report(
        "build", {
            "epsilon": hull.epsilon,
            "hull_points": hull.points.shape[0],
            "train_rows": X.shape[0],
            "iterations": hull.build_stats.iterations,
            "max_residual": hull.build_stats.max_residual,
            "out": args.out,
        }, inputs={"train": args.train}), None)


def _cmd_tu(args):
    hull = formats.read_hull(args.hull)
    T = _read_matrix(args, args.test)
    tu = metrics.to_hull_uncertainty(T, hull)
    formats.write_scores_csv(args.out, tu, "tu")
    _emit(reports.make_report(
        "tu", {"rows": int(tu.size), "mean_tu": float(tu.mean()),
               "max_tu": float(tu.max()), "out": args.out},
        inputs={"hull": args.hull, "test": args.test}), None)


def _cmd_summary(args):
    hull = formats.read_hull(args.hull)
    T = _read_matrix(args, args.test)
    tu = metrics.to_hull_uncertainty(T, hull)
    s = metrics.closure_ratio(tu)
    _emit(reports.make_report(
        "summary", {
            "closure_ratio": s.closure_ratio,
            "mean_exterior_tu": s.mean_exterior_tu,
            "n_closure": s.n_closure,
            "n_exterior": s.n_exterior,
        }, inputs={"hull": args.hull, "test": args.test}), args.out)


def _cmd_gini(args):
    P = _read_matrix(args, args.softmax)
    g = metrics.deep_gini(P)
    formats.write_scores_csv(args.out, g, "deep_gini")
    _emit(reports.make_report(
        "gini", {"rows": int(g.size), "mean_gini": float(g.mean()),
                 "out": args.out},
        inputs={"softmax": args.softmax}), None)


def _cmd_dsa(args):
    A = _read_matrix(args, args.train_act)
    T = _read_matrix(args, args.test_act)
    y = formats.read_lvec(args.train_labels)
    p = formats.read_lvec(args.test_pred)
    scores = metrics.dsa(A, y, T, p)
    degenerate = [int(i) for i in np.flatnonzero(~np.isfinite(scores))]
    if degenerate:
        raise HullcertError(
            f"{args.test_act}: degenerate DSA denominator at rows {degenerate}; "
            "refusing to serialize the +inf sentinel")
    formats.write_scores_csv(args.out, scores, "dsa")
    _emit(reports.make_report(
        "dsa", {"rows": int(scores.size), "mean_dsa": float(scores.mean()),
                "out": args.out},
        inputs={"train_act": args.train_act, "train_labels": args.train_labels,
                "test_act": args.test_act, "test_pred": args.test_pred}), None)


def _cmd_combine(args):
    name_a, a = formats.read_scores_csv(args.a)
    name_b, b = formats.read_scores_csv(args.b)
    c = metrics.combined_metric(a, b)
    formats.write_scores_csv(args.out, c, f"{name_a}*{name_b}")
    _emit(reports.make_report(
        "combine", {"rows": int(c.size), "out": args.out},
        inputs={"a": args.a, "b": args.b}), None)


def _cmd_detect(args):
    name_c, clean = formats.read_scores_csv(args.clean)
    _, adv = formats.read_scores_csv(args.adv)
    rep = evaluation.detect_adversarial(clean, adv, args.train_n, args.seed,
                                        metric_name=name_c)
    _emit(reports.make_report(
        "detect", {
            "accuracy": rep.accuracy,
            "n_train_per_class": rep.n_train_per_class,
            "n_eval_per_class": rep.n_eval_per_class,
            "metric_name": rep.metric_name,
        }, inputs={"clean": args.clean, "adv": args.adv}, seed=args.seed),
        args.out)


def _cmd_correlate(args):
    _, m = formats.read_scores_csv(args.metric)
    _, o = formats.read_scores_csv(args.other)
    correct = formats.read_lvec(args.correct)
    payload = evaluation.correlation_report(m, o, correct)
    _emit(reports.make_report(
        "correlate", payload,
        inputs={"metric": args.metric, "other": args.other,
                "correct": args.correct}), args.out)


def _cmd_select(args):
    _, s = formats.read_scores_csv(args.scores)
    idx = evaluation.prioritize_top_fraction(s, args.fraction)
    _emit(reports.make_report(
        "select", {"fraction": args.fraction, "n_selected": len(idx),
                   "indices": idx},
        inputs={"scores": args.scores}), args.out)


_COMMANDS = {
    "epsilon": _cmd_epsilon,
    "build": _cmd_build,
    "tu": _cmd_tu,
    "summary": _cmd_summary,
    "gini": _cmd_gini,
    "dsa": _cmd_dsa,
    "combine": _cmd_combine,
    "detect": _cmd_detect,
    "correlate": _cmd_correlate,
    "select": _cmd_select,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    try:
        _COMMANDS[args.command](args)
    except HullcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT
    return 0


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
