import logging

import numpy as np

from .._exceptions import NoEditableBytesInWindow
from .._pe import RawExe
from ..manipulations import apply, apply_bytes
from ._genetic import Evaluation, GeneticConfig, run_genetic
from ._query import QueryCounter

__all__ = [
    "run_blackbox_bytes",
]


def decode_bytes(genes):
    """Convert genes in [0, 1] to byte values."""
    return np.rint(np.asarray(genes) * 255.0).astype(np.uint8)


def run_blackbox_bytes(sample, manipulation, model, cfg=None, initial_score=None):
    """
    Optimize the editable bytes of a manipulated program with queries only.

    Parameters
    ----------
    sample : RawExe or bytes
        Program to attack.
    manipulation : str or tuple
        Manipulation identifier, or (identifier, parameters) pair.
    model : BaseClassifier
        Target classifier, only its score is used.
    cfg : GeneticConfig or None, optional, default None
        Optimizer configuration.
    initial_score : scalar or None, optional, default None
        Score of the unattacked program, recorded in the trace. The classifier
        is never queried for it, so that it sees at most `max_queries` queries.

    Returns
    -------
    AttackTrace
        One step per query, holding the best-so-far candidate.

    """
    data = sample.bytes if isinstance(sample, RawExe) else bytes(sample)
    patchable = apply(data, manipulation)
    if not patchable.size:
        raise NoEditableBytesInWindow(
            f"Manipulation '{patchable.manipulation}' grants no editable byte."
        )

    cfg = cfg if cfg is not None else GeneticConfig()
    counter = QueryCounter(model, cfg.max_queries)

    def objective(genes):
        candidate = apply_bytes(patchable, decode_bytes(genes))
        score = counter.score(candidate)

        return Evaluation(
            score, score, score >= model.threshold, len(candidate) - len(data)
        )

    best, trace = run_genetic(objective, patchable.size, cfg)
    logging.debug(f"{counter.count} queries, score = {trace.final_score:.6f}")

    return trace._replace(
        final_bytes=apply_bytes(patchable, decode_bytes(best.genes)),
        initial_score=initial_score,
    )
