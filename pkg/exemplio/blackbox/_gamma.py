import collections
import logging

import numpy as np

from .._common import check_keys
from .._exceptions import ConfigError, LengthMismatch, NoHeaderRoom
from .._pe import RawExe, header_room
from ..manipulations import (
    SectionPayload,
    apply,
    apply_bytes,
    inject_section,
    payload_slice_length,
    read_payloads,
)
from ..manipulations._common import load
from ._genetic import Evaluation, GeneticConfig, run_genetic
from ._query import QueryCounter

__all__ = [
    "GammaConfig",
    "gamma_candidate",
    "gamma_fitness",
    "run_gamma",
]


modes = {"padding", "section-injection"}


class GammaConfig(
    collections.namedtuple("GammaConfig", ["lambda_", "payloads", "mode", "binary"])
):
    __slots__ = ()

    def __new__(cls, lambda_=1.0e-5, payloads=None, mode="padding", binary=False):
        """
        Size-regularized benign content injection configuration.

        Parameters
        ----------
        lambda_ : scalar, optional, default 1.0e-5
            Weight of the injected size penalty.
        payloads : list of SectionPayload
            Benign payloads. The genome holds one inclusion fraction per
            payload.
        mode : str, optional, default 'padding'
            Injection mode:

             - 'padding': payload slices are concatenated and appended
             - 'section-injection': one new section per payload slice

        binary : bool, optional, default False
            If `True`, genes are decoded as all-or-nothing inclusions
            (gene >= 0.5).

        """
        payloads = tuple(payloads) if payloads is not None else ()
        if not payloads:
            raise ValueError("At least one payload is required.")

        if not all(isinstance(payload, SectionPayload) for payload in payloads):
            raise TypeError()

        if lambda_ < 0.0:
            raise ValueError("Regularization weight must be non-negative.")

        if mode not in modes:
            raise ValueError(f"Unknown injection mode '{mode}'.")

        return super().__new__(cls, float(lambda_), payloads, mode, bool(binary))

    @classmethod
    def from_dict(cls, data):
        """
        Build a configuration from a mapping, rejecting unknown keys.

        Key 'lambda' is the regularization weight and 'payloads' the path to
        a payload store.

        """
        keys = {"lambda", "payloads", "mode", "binary"}
        check_keys(data, keys, "gamma configuration")
        data = dict(data)
        if "lambda" in data:
            data["lambda_"] = data.pop("lambda")

        if isinstance(data.get("payloads"), str):
            data["payloads"] = read_payloads(data["payloads"])

        try:
            return cls(**data)

        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid gamma configuration: {e}")


def decode_fractions(genes, cfg):
    """Convert genes to inclusion fractions."""
    genes = np.clip(np.asarray(genes, dtype=np.float64), 0.0, 1.0)

    return (genes >= 0.5).astype(np.float64) if cfg.binary else genes


def gamma_candidate(data, genes, cfg):
    """
    Build the program injected with payload slices.

    Parameters
    ----------
    data : bytes
        Program content.
    genes : array_like
        One gene per payload.
    cfg : GammaConfig
        Injection configuration.

    Returns
    -------
    bytes
        Candidate program.
    int
        Number of injected payload bytes.

    """
    if len(genes) != len(cfg.payloads):
        raise LengthMismatch(
            f"Expected {len(cfg.payloads)} genes, got {len(genes)}."
        )

    fractions = decode_fractions(genes, cfg)
    if cfg.mode == "padding":
        content = b"".join(
            payload.content[: payload_slice_length(payload, s)]
            for payload, s in zip(cfg.payloads, fractions)
        )
        patchable = apply(data, "padding", n=len(content))

        return apply_bytes(patchable, content), len(content)

    injected = 0
    for payload, s in zip(cfg.payloads, fractions):
        data = inject_section(data, payload, s).bytes
        injected += payload_slice_length(payload, s)

    return data, injected


def gamma_fitness(sample, genome, model, cfg):
    """
    Score a program injected with benign content, penalized by injected size.

    Parameters
    ----------
    sample : RawExe or bytes
        Program to attack.
    genome : Genome or array_like
        One inclusion fraction per payload.
    model : BaseClassifier
        Target classifier. Queried exactly once.
    cfg : GammaConfig
        Injection configuration.

    Returns
    -------
    scalar
        Score of the candidate plus `lambda_` times the number of injected
        bytes.

    """
    return _evaluate(sample, genome, model, cfg).fitness


def _evaluate(sample, genome, model, cfg):
    """Build a candidate and return its evaluation."""
    data = sample.bytes if isinstance(sample, RawExe) else bytes(sample)
    genes = getattr(genome, "genes", genome)
    candidate, injected = gamma_candidate(data, genes, cfg)
    score = model.score(candidate)

    return Evaluation(
        score + cfg.lambda_ * injected, score, score >= model.threshold, injected
    )


def run_gamma(sample, model, gcfg, cfg=None, initial_score=None):
    """
    Inject benign content with a genetic search over inclusion fractions.

    Parameters
    ----------
    sample : RawExe or bytes
        Program to attack.
    model : BaseClassifier
        Target classifier, only its score is used.
    gcfg : GammaConfig
        Injection configuration.
    cfg : GeneticConfig or None, optional, default None
        Optimizer configuration.
    initial_score : scalar or None, optional, default None
        Score of the unattacked program, recorded in the trace. The classifier
        is never queried for it, so that it sees at most `max_queries` queries.

    Returns
    -------
    AttackTrace
        One step per query, holding the best-so-far candidate and its
        injected size.

    """
    data = sample.bytes if isinstance(sample, RawExe) else bytes(sample)
    if gcfg.mode == "section-injection":
        room = header_room(load(data))
        if room < len(gcfg.payloads):
            raise NoHeaderRoom(
                f"Headers have room for {room} new section(s), "
                f"{len(gcfg.payloads)} payloads requested."
            )

    cfg = cfg if cfg is not None else GeneticConfig()
    counter = QueryCounter(model, cfg.max_queries)
    best, trace = run_genetic(
        lambda genes: _evaluate(data, genes, counter, gcfg),
        len(gcfg.payloads),
        cfg,
    )
    logging.debug(f"{counter.count} queries, score = {trace.final_score:.6f}")

    return trace._replace(
        final_bytes=gamma_candidate(data, best.genes, gcfg)[0],
        initial_score=initial_score,
    )
