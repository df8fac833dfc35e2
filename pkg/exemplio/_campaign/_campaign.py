import logging
from multiprocessing import Pool

import numpy as np

from .._exceptions import ConfigError, ExemplioError
from ..blackbox import (
    GammaConfig,
    GeneticConfig,
    harvest_sections,
    run_blackbox_bytes,
    run_gamma,
)
from ..classifiers import read_model, train_cnn, train_trees
from ..manipulations import read_payloads
from ..whitebox import WhiteboxConfig, run_whitebox
from ._common import AttackResult, CampaignResult
from ._config import CampaignConfig, engine_to_checkpoints, read_config
from ._corpus import read_manifest

__all__ = [
    "load_model",
    "run_attack",
    "run_campaign",
]


model_to_trainer = {
    "byte-cnn": train_cnn,
    "trees": train_trees,
}


def load_model(cfg):
    """
    Read or train the target classifier of a campaign.

    Parameters
    ----------
    cfg : CampaignConfig
        Campaign configuration.

    Returns
    -------
    BaseClassifier
        Classifier with the campaign threshold.

    """
    if "path" in cfg.model:
        model = read_model(cfg.model["path"])

    else:
        dataset = read_manifest(cfg.dataset["manifest"])
        model = model_to_trainer[cfg.model["type"]](
            dataset,
            cfg.model.get("hyperparameters"),
            cfg.model.get("seed", cfg.seed),
        )
        logging.info(f"Training accuracy: {model.training_accuracy:.4f}")

    model.threshold = cfg.threshold

    return model


def load_payloads(gamma, goodware):
    """Read or harvest the benign payloads of a gamma attack."""
    if "payloads" in gamma:
        return read_payloads(gamma["payloads"])

    if goodware is None:
        raise ConfigError("Gamma attacks require payloads or a goodware directory.")

    return harvest_sections(
        goodware, gamma.get("section_name", ".data"), gamma.get("max_count", 100)
    )


def run_attack(
    attack, sample, model, efforts, seed=0, payloads=None, initial_score=None
):
    """
    Run one attack on one sample up to the largest effort checkpoint.

    Parameters
    ----------
    attack : AttackSpec
        Attack description.
    sample : RawExe
        Program to attack.
    model : BaseClassifier
        Target classifier.
    efforts : list of int
        Effort checkpoints (iterations or queries).
    seed : int, optional, default 0
        Default seed of the attack engine.
    payloads : list of SectionPayload or None, optional, default None
        Benign payloads, only for gamma attacks.
    initial_score : scalar or None, optional, default None
        Score of the unattacked program. Black-box engines record it without
        querying the classifier.

    Returns
    -------
    AttackTrace
        Attack trace.

    """
    if attack.engine == "whitebox":
        cfg = WhiteboxConfig(
            **{"seed": seed, **attack.config, "max_iterations": max(efforts)}
        )
        manipulation = (attack.manipulation, attack.params)

        return run_whitebox(sample, manipulation, model, cfg)

    cfg = GeneticConfig(**{"seed": seed, **attack.config, "max_queries": max(efforts)})
    if attack.engine == "blackbox":
        manipulation = (attack.manipulation, attack.params)

        return run_blackbox_bytes(sample, manipulation, model, cfg, initial_score)

    gamma = {k: v for k, v in attack.gamma.items() if k in {"mode", "binary"}}
    gcfg = GammaConfig(
        lambda_=attack.gamma.get("lambda", 1.0e-5), payloads=payloads, **gamma
    )

    return run_gamma(sample, model, gcfg, cfg, initial_score)


def _worker(args):
    """Run a task, turning library errors into inapplicable records."""
    attack, sample, model, efforts, seed, payloads, initial_score = args
    try:
        return run_attack(attack, sample, model, efforts, seed, payloads, initial_score)

    except ExemplioError as e:
        logging.warning(
            f"Attack '{attack.name}' is inapplicable to '{sample.sample_id}': "
            f"{type(e).__name__}: {e}"
        )

        return f"{type(e).__name__}: {e}"


def detection_rates(traces, efforts, threshold):
    """
    Compute detection rates at each checkpoint from recorded traces.

    The detection flag at checkpoint c is the one of the last step with
    effort lower than or equal to c. A sample without such a step keeps its
    unattacked score.

    """
    out = []
    for effort in efforts:
        detected = []
        for trace in traces:
            step = trace.at(effort)
            detected.append(
                step.detected
                if step is not None
                else trace.initial_score >= threshold
            )
        out.append(float(np.mean(detected)) if detected else None)

    return out


def run_campaign(cfg, jobs=None):
    """
    Run an attack campaign.

    Parameters
    ----------
    cfg : CampaignConfig, str, pathlike or dict
        Campaign configuration (or JSON document).
    jobs : int or None, optional, default None
        Number of worker processes. Overrides the configuration value.

    Returns
    -------
    CampaignResult
        Detection rates per attack and checkpoint, and per-sample traces.

    """
    cfg = cfg if isinstance(cfg, CampaignConfig) else read_config(cfg)
    jobs = jobs if jobs is not None else cfg.jobs
    model = load_model(cfg)

    samples = [
        sample
        for sample in read_manifest(cfg.dataset["attack_manifest"])
        if sample.label == "malicious"
    ]
    samples = samples[: cfg.dataset["max_samples"]]
    if not samples:
        raise ConfigError("No malicious sample to attack.")

    scores = [model.score(sample.bytes) for sample in samples]
    logging.info(f"Attacking {len(samples)} samples with {len(cfg.attacks)} attacks")

    pool = Pool(jobs) if jobs > 1 else None
    try:
        results = []
        for attack in cfg.attacks:
            efforts = cfg.checkpoints[engine_to_checkpoints[attack.engine]]
            payloads = (
                load_payloads(attack.gamma, cfg.dataset["goodware"])
                if attack.engine == "gamma"
                else None
            )
            tasks = [
                (attack, sample, model, efforts, cfg.seed + i, payloads, score)
                for i, (sample, score) in enumerate(zip(samples, scores))
            ]
            traces = pool.map(_worker, tasks) if pool else list(map(_worker, tasks))

            applicable = [t for t in traces if not isinstance(t, str)]
            results.append(
                AttackResult(
                    attack.name,
                    attack.engine,
                    list(efforts),
                    detection_rates(applicable, efforts, model.threshold),
                    len(applicable),
                    len(traces) - len(applicable),
                    [(sample.sample_id, t) for sample, t in zip(samples, traces)],
                )
            )
            logging.info(f"Attack '{attack.name}' done")

    finally:
        if pool is not None:
            pool.close()
            pool.join()

    return CampaignResult(
        results,
        float(np.mean([score >= model.threshold for score in scores])),
        len(samples),
        model.threshold,
    )
