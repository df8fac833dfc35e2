import json
import os

from .._campaign._campaign import load_payloads, run_attack
from .._campaign._config import _attack
from .._exceptions import ConfigError
from .._pe import read_exe, write_exe
from ..classifiers import read_model
from ._common import add_common_arguments, command, progress, setup_logging

__all__ = [
    "attack",
]


engine_to_effort = {
    "whitebox": 50,
    "blackbox": 500,
    "gamma": 500,
}


def _parse_param(value):
    """Parse a 'key=value' pair, value being JSON or a string."""
    key, sep, value = value.partition("=")
    if not sep:
        raise ConfigError(f"Invalid parameter '{key}' (expected key=value).")

    try:
        return key, json.loads(value)

    except json.JSONDecodeError:
        return key, value


@command
def attack(argv=None):
    parser = _get_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    entry = {"engine": args.engine}
    if args.engine != "gamma":
        entry["manipulation"] = args.manipulation
        entry["params"] = dict(_parse_param(param) for param in args.param)

    else:
        entry["gamma"] = {"lambda": args.lambda_, "mode": args.mode}
        if args.payloads is not None:
            entry["gamma"]["payloads"] = args.payloads

    if args.config is not None:
        with open(args.config, "r") as f:
            try:
                entry["config"] = json.load(f)

            except json.JSONDecodeError as e:
                raise ConfigError(f"Invalid JSON document: {e}.")

    spec = _attack(entry, 0, os.getcwd())
    effort = args.effort if args.effort is not None else engine_to_effort[args.engine]
    payloads = load_payloads(spec.gamma, args.goodware) if spec.gamma else None

    sample = read_exe(args.infile)
    model = read_model(args.model)
    if args.threshold is not None:
        model.threshold = args.threshold

    progress(f"Running {spec.name} attack on '{args.infile}'")
    seed = args.seed if args.seed is not None else 0
    score = model.score(sample.bytes)
    trace = run_attack(spec, sample, model, [effort], seed, payloads, score)
    print(" Done!")

    print(f"{'effort':>8} {'score':>10} {'detected':>9} {'injected':>9}")
    print(f"{0:>8} {trace.initial_score:>10.6f} {'-':>9} {0:>9}")
    for step in trace.steps:
        print(
            f"{step.effort:>8} {step.score:>10.6f} {str(step.detected):>9} "
            f"{step.injected:>9}"
        )
    print(f"Evasion {'succeeded' if trace.succeeded else 'failed'}.")

    if args.out is not None:
        write_exe(args.out, trace.final_bytes)


def _get_parser():
    import argparse

    # Initialize parser
    parser = argparse.ArgumentParser(
        description="Attack a single program and print the attack trace.",
        formatter_class=argparse.RawTextHelpFormatter,
    )

    # Input file
    parser.add_argument(
        "infile",
        type=str,
        help="program to attack",
    )

    # Model file
    parser.add_argument(
        "--model",
        "-m",
        type=str,
        required=True,
        help="target model file",
    )

    # Engine
    parser.add_argument(
        "--engine",
        "-e",
        type=str,
        choices=tuple(engine_to_effort),
        default="whitebox",
        help="attack engine",
    )

    # Manipulation
    parser.add_argument(
        "--manipulation",
        type=str,
        default="partial_dos",
        help="manipulation identifier (not used by gamma)",
    )

    # Manipulation parameters
    parser.add_argument(
        "--param",
        "-p",
        type=str,
        action="append",
        default=[],
        help="manipulation parameter as key=value (repeatable)",
    )

    # Engine configuration
    parser.add_argument(
        "--config",
        "-c",
        type=str,
        default=None,
        help="engine configuration (JSON)",
    )

    # Effort
    parser.add_argument(
        "--effort",
        type=int,
        default=None,
        help=(
            "number of iterations (whitebox, default 50) or queries (blackbox and "
            "gamma, default 500)"
        ),
    )

    # Threshold
    parser.add_argument(
        "--threshold",
        type=float,
        default=None,
        help="decision threshold (default from model file)",
    )

    # Gamma options
    parser.add_argument(
        "--lambda",
        dest="lambda_",
        type=float,
        default=1.0e-5,
        help="gamma size penalty weight",
    )
    parser.add_argument(
        "--mode",
        type=str,
        choices=("padding", "section-injection"),
        default="padding",
        help="gamma injection mode",
    )
    parser.add_argument(
        "--payloads",
        type=str,
        default=None,
        help="gamma payload store directory",
    )
    parser.add_argument(
        "--goodware",
        type=str,
        default=None,
        help="goodware directory to harvest gamma payloads from",
    )

    # Output file
    parser.add_argument(
        "--out",
        "-o",
        type=str,
        default=None,
        help="adversarial program output file",
    )

    add_common_arguments(parser)

    return parser
