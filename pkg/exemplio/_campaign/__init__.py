from ._campaign import load_model, run_attack, run_campaign
from ._common import AttackResult, CampaignResult, read_result, write_result
from ._config import AttackSpec, CampaignConfig, read_config
from ._corpus import make_corpus, read_manifest
from ._report import emit_report, register

__all__ = [
    "AttackSpec",
    "CampaignConfig",
    "AttackResult",
    "CampaignResult",
    "make_corpus",
    "read_manifest",
    "read_config",
    "load_model",
    "run_attack",
    "run_campaign",
    "emit_report",
    "register",
    "read_result",
    "write_result",
]
