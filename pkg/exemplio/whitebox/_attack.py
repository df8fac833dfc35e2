import collections
import logging

import numpy as np

from .._common import check_keys
from .._exceptions import ConfigError, NoEditableBytesInWindow, NotDifferentiable
from .._pe import RawExe
from .._trace import AttackTrace, TraceStep
from ..manipulations import apply, apply_bytes, region_bytes
from ._reconstruct import reconstruct_bytes

__all__ = [
    "WhiteboxConfig",
    "run_whitebox",
]


directions = {"spread", "exact"}


class WhiteboxConfig(
    collections.namedtuple(
        "WhiteboxConfig",
        [
            "max_iterations",
            "step_size",
            "stop_below_threshold",
            "seed",
            "random_init",
            "direction",
        ],
    )
):
    __slots__ = ()

    def __new__(
        cls,
        max_iterations=50,
        step_size=1.0,
        stop_below_threshold=False,
        seed=0,
        random_init=False,
        direction="spread",
    ):
        """
        White-box attack configuration.

        Parameters
        ----------
        max_iterations : int, optional, default 50
            Number of optimization iterations.
        step_size : scalar, optional, default 1.0
            Step size, in units of the typical distance between two byte
            embeddings.
        stop_below_threshold : bool, optional, default False
            If `True`, stop as soon as the score falls below the threshold.
        seed : int, optional, default 0
            Seed used to draw the initial editable content if `random_init`.
        random_init : bool, optional, default False
            If `True`, editable bytes are randomized before optimization.
        direction : str, optional, default 'spread'
            Descent direction:

             - 'spread': every window holding an editable byte receives a
               gradient (see `ByteCnn.score_and_direction`)
             - 'exact': exact gradient, zero outside arg-max windows

        """
        if int(max_iterations) < 1:
            raise ValueError("Maximum number of iterations must be at least 1.")

        if not step_size > 0.0:
            raise ValueError("Step size must be positive.")

        if direction not in directions:
            raise ValueError(f"Unknown direction '{direction}'.")

        return super().__new__(
            cls,
            int(max_iterations),
            float(step_size),
            bool(stop_below_threshold),
            int(seed),
            bool(random_init),
            direction,
        )

    @classmethod
    def from_dict(cls, data):
        """Build a configuration from a mapping, rejecting unknown keys."""
        check_keys(data, cls._fields, "whitebox configuration")
        try:
            return cls(**data)

        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid whitebox configuration: {e}")


def unit_rows(gradients):
    """Scale non-zero rows to unit L2 norm."""
    norm = np.linalg.norm(gradients, axis=1, keepdims=True)

    return np.divide(gradients, norm, out=np.zeros_like(gradients), where=norm > 0.0)


def embedding_scale(table):
    """Return root mean square distance between two byte embeddings."""
    return float(np.sqrt(2.0 * table[:256].var(axis=0).sum()))


def run_whitebox(sample, manipulation, model, cfg=None):
    """
    Optimize the editable bytes of a manipulated program against a
    differentiable classifier.

    Each iteration computes a descent direction w.r.t. the embeddings of all
    editable bytes seen by the model, reconstructs every byte from a step in
    embedding space, and records the score of the updated program. Directions
    are scaled to unit norm per position, then by the typical distance between
    byte embeddings, so that `step_size` does not depend on score saturation
    nor on the spread of the embedding table.

    Parameters
    ----------
    sample : RawExe or bytes
        Program to attack.
    manipulation : str or tuple
        Manipulation identifier, or (identifier, parameters) pair.
    model : BaseClassifier
        Differentiable classifier.
    cfg : WhiteboxConfig or None, optional, default None
        Attack configuration.

    Returns
    -------
    AttackTrace
        One step per iteration, with effort equal to the iteration number.

    """
    if not model.differentiable:
        raise NotDifferentiable(f"{model.name} classifier is not differentiable.")

    cfg = cfg if cfg is not None else WhiteboxConfig()
    data = sample.bytes if isinstance(sample, RawExe) else bytes(sample)
    patchable = apply(data, manipulation)

    positions = patchable.positions
    in_window = positions < model.max_length
    excluded = int((~in_window).sum())
    if not in_window.any():
        raise NoEditableBytesInWindow(
            f"None of the {len(positions)} editable bytes fall in the first "
            f"{model.max_length} bytes seen by the model."
        )

    if excluded:
        logging.warning(
            f"{excluded} editable bytes beyond offset {model.max_length} are "
            "ignored."
        )

    values = np.frombuffer(region_bytes(patchable), dtype=np.uint8).copy()
    if cfg.random_init:
        rng = np.random.default_rng(cfg.seed)
        values[:] = rng.integers(0, 256, len(values), dtype=np.uint8)

    window = positions[in_window]
    current = apply_bytes(patchable, values)
    table = model.embedding_table
    step = cfg.step_size * embedding_scale(table)
    descent = (
        model.score_and_direction
        if cfg.direction == "spread"
        else model.score_and_gradient
    )
    initial_score = model.score(data)

    steps = []
    for i in range(cfg.max_iterations):
        _, grad = descent(current, window)
        embeddings = table[values[in_window]]
        values[in_window] = reconstruct_bytes(
            embeddings, unit_rows(grad.gradients), table, step
        )
        current = apply_bytes(patchable, values)

        score = model.score(current)
        steps.append(
            TraceStep(
                i + 1,
                score,
                score >= model.threshold,
                len(current) - len(data),
                score,
            )
        )
        logging.debug(f"Iteration {i + 1}: score = {score:.6f}")

        if cfg.stop_below_threshold and score < model.threshold:
            break

    return AttackTrace(
        steps,
        current,
        not steps[-1].detected,
        initial_score,
        excluded,
    )
