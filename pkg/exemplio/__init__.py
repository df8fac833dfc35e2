from . import _cli, blackbox, classifiers, manipulations, whitebox
from .__about__ import __version__
from ._campaign import (
    AttackSpec,
    CampaignConfig,
    CampaignResult,
    emit_report,
    make_corpus,
    read_config,
    read_manifest,
    read_result,
    run_campaign,
    write_result,
)
from ._campaign import register as register_report
from ._exceptions import ExemplioError
from ._pe import (
    ParsedPe,
    RawExe,
    parse,
    read_exe,
    serialize,
    synth_pe,
    validate,
    write_exe,
)
from ._trace import AttackTrace, TraceStep

__all__ = [
    "RawExe",
    "ParsedPe",
    "AttackTrace",
    "TraceStep",
    "AttackSpec",
    "CampaignConfig",
    "CampaignResult",
    "ExemplioError",
    "parse",
    "serialize",
    "validate",
    "synth_pe",
    "read_exe",
    "write_exe",
    "make_corpus",
    "read_manifest",
    "read_config",
    "run_campaign",
    "read_result",
    "write_result",
    "emit_report",
    "register_report",
    "manipulations",
    "classifiers",
    "whitebox",
    "blackbox",
    "_cli",
    "__version__",
]
