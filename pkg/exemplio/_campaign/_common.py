import collections

from .._common import check_keys, read_json, write_json
from .._exceptions import ConfigError
from .._trace import AttackTrace

__all__ = [
    "AttackResult",
    "CampaignResult",
    "read_result",
    "write_result",
]


AttackResult = collections.namedtuple(
    "AttackResult",
    [
        "name",
        "engine",
        "checkpoints",
        "detection_rates",
        "n_samples",
        "inapplicable",
        "samples",
    ],
)


CampaignResult = collections.namedtuple(
    "CampaignResult",
    ["attacks", "original_detection_rate", "n_samples", "threshold"],
)


def write_result(filename, result):
    """
    Write a campaign result (rates and per-sample traces) to JSON.

    Parameters
    ----------
    filename : str, pathlike or buffer
        Output file name or buffer.
    result : CampaignResult
        Campaign result.

    """
    if not isinstance(result, CampaignResult):
        raise TypeError()

    out = result._asdict()
    out["attacks"] = []
    for attack in result.attacks:
        tmp = attack._asdict()
        tmp["samples"] = [
            {
                "sample_id": sample_id,
                **(
                    {"trace": trace.to_dict()}
                    if isinstance(trace, AttackTrace)
                    else {"error": trace}
                ),
            }
            for sample_id, trace in attack.samples
        ]
        out["attacks"].append(tmp)

    write_json(filename, out)


def read_result(filename):
    """
    Read a campaign result written by :func:`write_result`.

    Parameters
    ----------
    filename : str, pathlike or buffer
        Input file name or buffer.

    Returns
    -------
    CampaignResult
        Campaign result. Final bytes of traces are not stored.

    """
    data = read_json(filename)
    check_keys(data, CampaignResult._fields, "campaign result")

    try:
        attacks = []
        for attack in data["attacks"]:
            check_keys(attack, AttackResult._fields, "campaign result attack")
            samples = [
                (
                    sample["sample_id"],
                    AttackTrace.from_dict(sample["trace"])
                    if "trace" in sample
                    else sample["error"],
                )
                for sample in attack["samples"]
            ]
            attacks.append(AttackResult(**{**attack, "samples": samples}))

        return CampaignResult(**{**data, "attacks": attacks})

    except (KeyError, TypeError) as e:
        raise ConfigError(f"Invalid campaign result: {e}.")
