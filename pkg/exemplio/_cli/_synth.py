from .._campaign import make_corpus
from .._common import read_json
from ._common import add_common_arguments, command, progress, setup_logging

__all__ = [
    "synth",
]


@command
def synth(argv=None):
    parser = _get_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    spec = args.config
    if args.n_per_class is not None:
        spec = dict(read_json(spec)) if spec is not None else {}
        spec["n_per_class"] = args.n_per_class

    progress(f"Writing synthetic corpus to '{args.out}'")
    manifest = make_corpus(spec, args.seed if args.seed is not None else 0, args.out)
    print(" Done!")
    print(f"{len(manifest)} programs written.")


def _get_parser():
    import argparse

    # Initialize parser
    parser = argparse.ArgumentParser(
        description="Write a labelled corpus of synthetic programs.",
        formatter_class=argparse.RawTextHelpFormatter,
    )

    # Corpus specification
    parser.add_argument(
        "--config",
        "-c",
        type=str,
        default=None,
        help="corpus specification (JSON)",
    )

    # Output directory
    parser.add_argument(
        "--out",
        "-o",
        type=str,
        default="corpus",
        help="output directory",
    )

    # Number of programs
    parser.add_argument(
        "--n-per-class",
        "-n",
        type=int,
        default=None,
        help="number of programs per class",
    )

    add_common_arguments(parser)

    return parser
