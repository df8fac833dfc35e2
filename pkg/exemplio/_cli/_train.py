from .._campaign import read_manifest
from .._common import read_json
from ..classifiers import train_cnn, train_trees, write_model
from ._common import add_common_arguments, command, progress, setup_logging

__all__ = [
    "train",
]


model_to_trainer = {
    "byte-cnn": train_cnn,
    "trees": train_trees,
}


@command
def train(argv=None):
    parser = _get_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    progress(f"Reading manifest '{args.manifest}'")
    dataset = read_manifest(args.manifest)
    print(" Done!")

    hyperparameters = read_json(args.config) if args.config is not None else None
    seed = args.seed if args.seed is not None else 0

    progress(f"Training {args.model} model on {len(dataset)} programs")
    model = model_to_trainer[args.model](dataset, hyperparameters, seed)
    print(" Done!")
    print(f"Training accuracy: {model.training_accuracy:.4f}")

    progress(f"Writing model file '{args.out}'")
    write_model(args.out, model)
    print(" Done!")


def _get_parser():
    import argparse

    # Initialize parser
    parser = argparse.ArgumentParser(
        description="Train a target classifier on a labelled dataset.",
        formatter_class=argparse.RawTextHelpFormatter,
    )

    # Dataset manifest
    parser.add_argument(
        "manifest",
        type=str,
        help="dataset manifest (JSON list of {path, label})",
    )

    # Model type
    parser.add_argument(
        "--model",
        "-m",
        type=str,
        choices=list(model_to_trainer),
        default="byte-cnn",
        help="model type",
    )

    # Hyperparameters
    parser.add_argument(
        "--config",
        "-c",
        type=str,
        default=None,
        help="hyperparameters (JSON)",
    )

    # Output file
    parser.add_argument(
        "--out",
        "-o",
        type=str,
        default="model.exmd",
        help="output model file",
    )

    add_common_arguments(parser)

    return parser
