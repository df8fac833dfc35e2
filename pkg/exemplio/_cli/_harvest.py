from ..blackbox import harvest_sections
from ..manipulations import write_payloads
from ._common import add_common_arguments, command, progress, setup_logging

__all__ = [
    "harvest",
]


@command
def harvest(argv=None):
    parser = _get_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    progress(f"Harvesting '{args.section}' sections from '{args.goodware}'")
    payloads = harvest_sections(args.goodware, args.section, args.max_count)
    print(" Done!")

    progress(f"Writing {len(payloads)} payloads to '{args.out}'")
    write_payloads(args.out, payloads)
    print(" Done!")


def _get_parser():
    import argparse

    # Initialize parser
    parser = argparse.ArgumentParser(
        description="Extract benign section contents into a payload store.",
        formatter_class=argparse.RawTextHelpFormatter,
    )

    # Goodware directory
    parser.add_argument(
        "goodware",
        type=str,
        help="directory of benign programs",
    )

    # Section name filter
    parser.add_argument(
        "--section",
        "-s",
        type=str,
        default=".data",
        help="section name or shell-style pattern",
    )

    # Maximum number of payloads
    parser.add_argument(
        "--max-count",
        "-n",
        type=int,
        default=100,
        help="maximum number of payloads",
    )

    # Output directory
    parser.add_argument(
        "--out",
        "-o",
        type=str,
        default="payloads",
        help="payload store directory",
    )

    add_common_arguments(parser, seed=False)

    return parser
