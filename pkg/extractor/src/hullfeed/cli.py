"""Command line entry point: `hullfeed run manifest.json`."""

from __future__ import annotations

import argparse
import sys

from .errors import HullfeedError
from .extract import run
from .manifest import load_manifest


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hullfeed",
        description="Extract FVEC/LVEC inputs for the hull toolkit "
                    "from a torch model and image matrix.")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute an extraction manifest")
    run_p.add_argument("manifest", help="path to the JSON manifest")
    return parser


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        written = run(load_manifest(args.manifest))
    except HullfeedError as exc:
        print(f"hullfeed: error: {exc}", file=sys.stderr)
        return 2
    for key in sorted(written):
        print(f"{key}: {written[key]}")
    return 0


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
