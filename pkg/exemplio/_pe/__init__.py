from ._common import ParsedPe, RawExe, SectionEntry, ValidationReport, Violation
from ._helpers import read_exe, write_exe
from ._parse import parse, serialize
from ._regions import align_up, header_room, locate_overlay, locate_slack
from ._synth import read_builder_spec, sample_bytes, synth_pe
from ._validate import validate

__all__ = [
    "RawExe",
    "ParsedPe",
    "SectionEntry",
    "ValidationReport",
    "Violation",
    "parse",
    "serialize",
    "validate",
    "align_up",
    "header_room",
    "locate_slack",
    "locate_overlay",
    "synth_pe",
    "read_builder_spec",
    "sample_bytes",
    "read_exe",
    "write_exe",
]
