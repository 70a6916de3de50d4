"""Command line entry: render one recipe per invocation."""
import argparse
import sys

from .render import FORMATS, KINDS, FigureRecipe, render
from .style import StyleOptions

EXIT_OK = 0
EXIT_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="momentplots",
        description="render one figure from momentflow trajectory CSV files",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("inputs", nargs="+", help="trajectory CSV files")
    parser.add_argument("--out", required=True,
                        help="output path without extension")
    parser.add_argument("--format", action="append", choices=FORMATS, default=[],
                        help="output format; repeatable (default: png and svg)")
    parser.add_argument("--label", action="append", default=[],
                        help="legend label per input; repeatable")
    parser.add_argument("--title", default="", help="figure title override")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    style = StyleOptions(labels=tuple(args.label), title=args.title)
    recipe = FigureRecipe(
        kind=args.kind,
        inputs=tuple(args.inputs),
        output=args.out,
        formats=tuple(args.format) or FORMATS,
        style=style,
    )
    try:
        written = render(recipe)
    except (ValueError, OSError) as err:
        print(str(err), file=sys.stderr)
        return EXIT_INPUT
    print("wrote " + ", ".join(written))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
