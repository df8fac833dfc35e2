import functools
import logging
import sys

from .._exceptions import ConfigError, ExemplioError

__all__ = [
    "command",
    "add_common_arguments",
]


def command(func):
    """Turn a command into a function returning an exit code."""

    @functools.wraps(func)
    def wrapper(argv=None):
        try:
            out = func(argv)

        except ConfigError as e:
            print(f"\nConfiguration error: {e}", file=sys.stderr)
            return 1

        except (ExemplioError, OSError) as e:
            print(f"\nError: {type(e).__name__}: {e}", file=sys.stderr)
            return 2

        return out if out is not None else 0

    return wrapper


def add_common_arguments(parser, seed=True):
    """Add options shared by all commands."""
    # Seed
    if seed:
        parser.add_argument(
            "--seed",
            type=int,
            default=None,
            help="random seed",
        )

    # Verbosity
    parser.add_argument(
        "--verbose",
        "-v",
        default=False,
        action="store_true",
        help="display progress messages",
    )


def setup_logging(verbose):
    """Configure root logger."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )


def progress(message):
    """Print a progress message without line break."""
    print(f"{message} ...", end="")
    sys.stdout.flush()
