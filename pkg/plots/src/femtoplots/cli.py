"""Command line: render one figure CSV to a static image."""
from __future__ import annotations

import argparse
import sys

from .render import FIGURE_SCHEMAS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="femtosim-plots",
        description="Render femtosim figure CSV datasets as static plots")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render")
    p.add_argument("--figure", required=True, choices=sorted(FIGURE_SCHEMAS))
    p.add_argument("--in", dest="input_csv", required=True)
    p.add_argument("--out", dest="output_image", required=True)
    args = parser.parse_args(argv)
    try:
        path = render(FigureSpec(figure_id=args.figure,
                                 input_csv=args.input_csv,
                                 output_image=args.output_image))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
