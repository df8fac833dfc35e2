from ._common import Patchable, SectionPayload, apply_bytes, combine, region_bytes
from ._dos import full_dos, partial_dos
from ._headers import extend, shift
from ._helpers import apply, available, chain, parameters, register
from ._padding import padding, slack_fill, slack_padding
from ._payloads import read_payloads, write_payloads
from ._section import inject_section, payload_slice_length

__all__ = [
    "Patchable",
    "SectionPayload",
    "partial_dos",
    "full_dos",
    "extend",
    "shift",
    "padding",
    "slack_fill",
    "slack_padding",
    "inject_section",
    "payload_slice_length",
    "apply_bytes",
    "combine",
    "chain",
    "region_bytes",
    "register",
    "apply",
    "available",
    "parameters",
    "read_payloads",
    "write_payloads",
]


register("partial_dos", partial_dos)
register("full_dos", full_dos)
register("extend", extend)
register("shift", shift)
register("padding", padding)
register("slack_fill", slack_fill)
register("slack_padding", slack_padding)
register("inject_section", inject_section)
