import collections
import os

from .._common import check_keys, read_json
from .._exceptions import ConfigError
from ..blackbox import GeneticConfig
from ..blackbox._gamma import modes as gamma_modes
from ..classifiers._byte_cnn import default_hyperparameters as cnn_hyperparameters
from ..classifiers._byte_cnn import default_training as cnn_training
from ..classifiers._trees import default_hyperparameters as tree_hyperparameters
from ..manipulations import available, parameters
from ..whitebox import WhiteboxConfig

__all__ = [
    "AttackSpec",
    "CampaignConfig",
    "read_config",
]


VERSION = 1

engines = {"whitebox", "blackbox", "gamma"}
engine_to_checkpoints = {
    "whitebox": "iterations",
    "blackbox": "queries",
    "gamma": "queries",
}

config_keys = {
    "version",
    "dataset",
    "model",
    "attacks",
    "checkpoints",
    "threshold",
    "seed",
    "jobs",
}
dataset_keys = {"manifest", "attack_manifest", "goodware", "max_samples"}
model_keys = {"type", "hyperparameters", "seed", "path"}
attack_keys = {"name", "engine", "manipulation", "params", "config", "gamma"}
gamma_keys = {"lambda", "mode", "binary", "payloads", "section_name", "max_count"}
checkpoint_keys = {"iterations", "queries"}

default_checkpoints = {"iterations": [1, 25, 50], "queries": [10, 250, 500]}

model_to_hyperparameters = {
    "byte-cnn": {*cnn_hyperparameters, *cnn_training},
    "trees": set(tree_hyperparameters),
}


AttackSpec = collections.namedtuple(
    "AttackSpec", ["name", "engine", "manipulation", "params", "config", "gamma"]
)


CampaignConfig = collections.namedtuple(
    "CampaignConfig",
    ["dataset", "model", "attacks", "checkpoints", "threshold", "seed", "jobs"],
)


def _path(value, root, where):
    """Resolve a path relative to the configuration file."""
    if not isinstance(value, str):
        raise ConfigError(f"Expected a path in {where}.")

    return value if os.path.isabs(value) else os.path.join(root, value)


def _checkpoints(data):
    """Validate effort checkpoints."""
    check_keys(data, checkpoint_keys, "checkpoints")
    out = {**default_checkpoints, **data}
    for k, values in out.items():
        if (
            not isinstance(values, list)
            or not values
            or not all(isinstance(v, int) and v >= 1 for v in values)
        ):
            raise ConfigError(f"Checkpoints '{k}' must be a list of positive integers.")

        if any(v2 <= v1 for v1, v2 in zip(values, values[1:])):
            raise ConfigError(f"Checkpoints '{k}' must be strictly increasing.")

    return out


def _attack(data, i, root):
    """Validate an attack entry."""
    where = f"attacks[{i}]"
    check_keys(data, attack_keys, where)

    engine = data.get("engine")
    if engine not in engines:
        raise ConfigError(f"Unknown engine '{engine}' in {where}.")

    manipulation = data.get("manipulation")
    if engine == "gamma":
        if manipulation is not None:
            raise ConfigError(f"Key 'manipulation' is not used by gamma in {where}.")

    elif manipulation not in available():
        raise ConfigError(f"Unknown manipulation '{manipulation}' in {where}.")

    params = data.get("params", {})
    if manipulation is not None:
        check_keys(params, parameters(manipulation), f"{where}.params")
    elif params:
        raise ConfigError(f"Key 'params' is not used by gamma in {where}.")

    # Effort bounds come from checkpoints
    config = data.get("config", {})
    if engine == "whitebox":
        allowed = set(WhiteboxConfig._fields) - {"max_iterations"}
        check_keys(config, allowed, f"{where}.config")
        WhiteboxConfig.from_dict(config)

    else:
        allowed = set(GeneticConfig._fields) - {"max_queries", "jobs"}
        check_keys(config, allowed, f"{where}.config")
        GeneticConfig.from_dict(config)

    gamma = None
    if engine == "gamma":
        gamma = dict(data.get("gamma", {}))
        check_keys(gamma, gamma_keys, f"{where}.gamma")
        if gamma.get("mode", "padding") not in gamma_modes:
            raise ConfigError(f"Unknown gamma mode '{gamma['mode']}' in {where}.")

        lambda_ = gamma.get("lambda", 0.0)
        if not isinstance(lambda_, (int, float)) or lambda_ < 0.0:
            raise ConfigError(f"Key 'lambda' must be non-negative in {where}.")

        max_count = gamma.get("max_count", 1)
        if not isinstance(max_count, int) or max_count < 1:
            raise ConfigError(f"Key 'max_count' must be a positive integer in {where}.")

        if "payloads" in gamma:
            gamma["payloads"] = _path(gamma["payloads"], root, f"{where}.gamma")

    elif "gamma" in data:
        raise ConfigError(f"Key 'gamma' is only used by gamma in {where}.")

    name = data.get("name", f"{manipulation or 'gamma'}-{engine}")

    return AttackSpec(name, engine, manipulation, dict(params), dict(config), gamma)


def read_config(filename):
    """
    Read and validate a campaign configuration.

    Parameters
    ----------
    filename : str, pathlike, buffer or dict
        JSON document. Relative paths are resolved from the document
        directory (current directory for buffers and dicts).

    Returns
    -------
    CampaignConfig
        Validated configuration.

    """
    data = read_json(filename)
    root = (
        os.path.dirname(os.path.abspath(filename))
        if isinstance(filename, (str, os.PathLike))
        else os.getcwd()
    )

    check_keys(data, config_keys, "campaign configuration")
    if data.get("version") != VERSION:
        raise ConfigError(
            f"Unsupported configuration version '{data.get('version')}' "
            f"(expected {VERSION})."
        )

    # Dataset
    dataset = dict(data.get("dataset", {}))
    check_keys(dataset, dataset_keys, "dataset")
    if "manifest" not in dataset:
        raise ConfigError("Key 'manifest' is required in dataset.")

    for k in ("manifest", "attack_manifest", "goodware"):
        if k in dataset:
            dataset[k] = _path(dataset[k], root, "dataset")
    dataset.setdefault("attack_manifest", dataset["manifest"])
    dataset.setdefault("goodware", None)
    dataset.setdefault("max_samples", None)
    max_samples = dataset["max_samples"]
    if max_samples is not None and not (
        isinstance(max_samples, int) and max_samples >= 1
    ):
        raise ConfigError("Key 'max_samples' must be a positive integer.")

    # Model
    model = dict(data.get("model", {}))
    check_keys(model, model_keys, "model")
    if "path" in model:
        if set(model) != {"path"}:
            raise ConfigError("Key 'path' excludes other model keys.")
        model["path"] = _path(model["path"], root, "model")

    elif model.get("type") not in model_to_hyperparameters:
        raise ConfigError(f"Unknown model type '{model.get('type')}'.")

    else:
        allowed = model_to_hyperparameters[model["type"]]
        check_keys(model.get("hyperparameters", {}), allowed, "model.hyperparameters")

    # Attacks
    attacks = data.get("attacks")
    if not isinstance(attacks, list) or not attacks:
        raise ConfigError("At least one attack is required.")
    attacks = [_attack(attack, i, root) for i, attack in enumerate(attacks)]

    names = [attack.name for attack in attacks]
    if len(set(names)) != len(names):
        raise ConfigError("Attack names must be unique.")

    threshold = data.get("threshold", 0.5)
    if not 0.0 < threshold < 1.0:
        raise ConfigError("Threshold must be in (0, 1).")

    jobs = data.get("jobs", 1)
    if not isinstance(jobs, int) or jobs < 1:
        raise ConfigError("Number of jobs must be a positive integer.")

    return CampaignConfig(
        dataset,
        model,
        attacks,
        _checkpoints(data.get("checkpoints", {})),
        float(threshold),
        int(data.get("seed", 0)),
        jobs,
    )
