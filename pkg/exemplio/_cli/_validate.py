from .._pe import validate as validate_pe
from ._common import add_common_arguments, command, setup_logging

__all__ = [
    "validate",
]


@command
def validate(argv=None):
    parser = _get_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    with open(args.infile, "rb") as f:
        report = validate_pe(f.read())

    print(f"{args.infile}: {report}")

    return 0 if report.ok else 2


def _get_parser():
    import argparse

    # Initialize parser
    parser = argparse.ArgumentParser(
        description="Check that a file is a structurally valid program.",
        formatter_class=argparse.RawTextHelpFormatter,
    )

    # Input file
    parser.add_argument(
        "infile",
        type=str,
        help="program file",
    )

    add_common_arguments(parser, seed=False)

    return parser
