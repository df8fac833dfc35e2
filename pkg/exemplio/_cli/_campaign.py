from .._campaign import emit_report, read_config, run_campaign, write_result
from .._exceptions import ConfigError
from ._common import add_common_arguments, command, progress, setup_logging

__all__ = [
    "campaign",
]


@command
def campaign(argv=None):
    parser = _get_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    if (args.config is None) == (args.config_file is None):
        raise ConfigError("Provide the configuration file exactly once.")
    filename = args.config if args.config is not None else args.config_file

    cfg = read_config(filename)
    if args.seed is not None:
        cfg = cfg._replace(seed=args.seed)

    progress(f"Running campaign '{filename}'")
    result = run_campaign(cfg, args.jobs)
    print(" Done!")
    print(
        f"Original detection rate: {100.0 * result.original_detection_rate:.1f}% "
        f"({result.n_samples} samples)"
    )

    progress(f"Writing campaign result '{args.out}'")
    write_result(args.out, result)
    print(" Done!")

    if args.report is not None:
        progress(f"Writing report '{args.report}'")
        emit_report(result, args.report, args.file_format)
        print(" Done!")


def _get_parser():
    import argparse

    # Initialize parser
    parser = argparse.ArgumentParser(
        description="Run an attack campaign and aggregate detection rates.",
        formatter_class=argparse.RawTextHelpFormatter,
    )

    # Configuration file
    parser.add_argument(
        "config",
        nargs="?",
        type=str,
        default=None,
        help="campaign configuration (JSON)",
    )
    parser.add_argument(
        "--config",
        "-c",
        dest="config_file",
        type=str,
        default=None,
        help="campaign configuration (JSON), alternative to the positional argument",
    )

    # Output file
    parser.add_argument(
        "--out",
        "-o",
        type=str,
        default="campaign.json",
        help="campaign result file (JSON)",
    )

    # Report file
    parser.add_argument(
        "--report",
        "-r",
        type=str,
        default=None,
        help="detection rate report file",
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

    # Number of workers
    parser.add_argument(
        "--jobs",
        "-j",
        type=int,
        default=None,
        help="number of worker processes",
    )

    add_common_arguments(parser)

    return parser
