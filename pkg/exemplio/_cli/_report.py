from .._campaign import emit_report, read_result
from ._common import add_common_arguments, command, progress, setup_logging

__all__ = [
    "report",
]


@command
def report(argv=None):
    parser = _get_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    result = read_result(args.infile)

    progress(f"Writing report '{args.out}'")
    emit_report(result, args.out, args.file_format)
    print(" Done!")


def _get_parser():
    import argparse

    # Initialize parser
    parser = argparse.ArgumentParser(
        description="Write detection rate tables from a stored campaign result.",
        formatter_class=argparse.RawTextHelpFormatter,
    )

    # Campaign result
    parser.add_argument(
        "infile",
        type=str,
        help="campaign result file (JSON)",
    )

    # Output file
    parser.add_argument(
        "--out",
        "-o",
        type=str,
        default="report.csv",
        help="report file",
    )

    # File format
    parser.add_argument(
        "--format",
        "-f",
        dest="file_format",
        type=str,
        choices=("csv", "json"),
        default=None,
        help="report format (inferred from extension if not provided)",
    )

    add_common_arguments(parser, seed=False)

    return parser
