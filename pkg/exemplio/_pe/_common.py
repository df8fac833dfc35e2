import collections

__all__ = [
    "RawExe",
    "SectionEntry",
    "ParsedPe",
    "Violation",
    "ValidationReport",
]


DOS_MAGIC = b"MZ"
DOS_HEADER_SIZE = 0x40
HEADER_OFFSET_FIELD = 0x3C
PE_SIGNATURE = b"PE\x00\x00"
COFF_HEADER_SIZE = 20
MIN_HEADER_SIZE = len(PE_SIGNATURE) + COFF_HEADER_SIZE
SECTION_HEADER_SIZE = 40
SECURITY_DIRECTORY = 4

# Offsets relative to the optional header
OPT_SECTION_ALIGNMENT = 32
OPT_SIZE_OF_IMAGE = 56
OPT_SIZE_OF_HEADERS = 60
OPT_MIN_SIZE = 68

optional_magic_to_format = {0x10B: "pe32", 0x20B: "pe32+"}
format_to_optional_magic = {v: k for k, v in optional_magic_to_format.items()}
format_to_optional_size = {"pe32": 224, "pe32+": 240}
format_to_data_directories = {"pe32": 96, "pe32+": 112}

LABELS = ("benign", "malicious")


RawExe = collections.namedtuple("RawExe", ["bytes", "sample_id", "label"])


Violation = collections.namedtuple("Violation", ["rule", "message", "offset"])


class ValidationReport(
    collections.namedtuple("ValidationReport", ["ok", "violations"])
):
    __slots__ = ()

    def __str__(self):
        """Human readable summary."""
        if self.ok:
            return "OK"

        return "\n".join(
            f"[{v.rule}] {v.message}"
            + (f" (offset 0x{v.offset:x})" if v.offset is not None else "")
            for v in self.violations
        )

    @property
    def rules(self):
        """Return the set of violated rule identifiers."""
        return {v.rule for v in self.violations}


class SectionEntry(
    collections.namedtuple(
        "SectionEntry",
        [
            "name",
            "virtual_address",
            "virtual_size",
            "raw_pointer",
            "raw_size",
            "characteristics",
        ],
    )
):
    __slots__ = ()

    @property
    def label(self):
        """Return section name as a string."""
        return self.name.rstrip(b"\x00").decode("latin-1")

    @property
    def raw_end(self):
        """Return end of raw data in file."""
        return self.raw_pointer + self.raw_size

    @property
    def content_end(self):
        """Return end of the meaningful content (excludes slack)."""
        return self.raw_pointer + min(self.virtual_size, self.raw_size)

    @property
    def virtual_end(self):
        """Return end of section in memory."""
        return self.virtual_address + max(self.virtual_size, self.raw_size)


class ParsedPe(
    collections.namedtuple(
        "ParsedPe",
        [
            "raw",
            "dos_magic",
            "header_offset",
            "machine",
            "pe_format",
            "num_sections",
            "size_of_optional_header",
            "entry_point",
            "file_alignment",
            "section_alignment",
            "size_of_image",
            "size_of_headers",
            "security",
            "sections",
            "overlay",
            "directories",
        ],
    )
):
    __slots__ = ()

    @property
    def optional_header_offset(self):
        """Return file offset of the optional header."""
        return self.header_offset + MIN_HEADER_SIZE

    @property
    def section_table_offset(self):
        """Return file offset of the section table."""
        return self.optional_header_offset + self.size_of_optional_header

    @property
    def section_table_end(self):
        """Return end of the section table."""
        return self.section_table_offset + SECTION_HEADER_SIZE * self.num_sections

    @property
    def signed(self):
        """Return `True` if the file carries a certificate directory."""
        return self.security[1] > 0

    @property
    def raw_sections(self):
        """Return sections with raw data, in file order."""
        return sorted(
            (s for s in self.sections if s.raw_size > 0), key=lambda s: s.raw_pointer
        )

    def section_content(self, section):
        """Return meaningful content of a section."""
        return self.raw[section.raw_pointer : section.content_end]
