from .._exceptions import ParseError
from ._common import ValidationReport, Violation
from ._parse import parse

__all__ = [
    "validate",
]


def validate(data):
    """
    Check that a buffer is a structurally valid PE file.

    Parameters
    ----------
    data : bytes or bytearray
        File content.

    Returns
    -------
    ValidationReport
        namedtuple (ok, violations). Malformed input is reported, never raised.

    """
    try:
        pe = parse(data)

    except ParseError as e:
        return ValidationReport(False, [Violation(e.rule, str(e), e.offset)])

    except TypeError as e:
        return ValidationReport(False, [Violation("parse-error", str(e), None)])

    violations = check(pe)

    return ValidationReport(not violations, violations)


def check(pe):
    """Return the list of structural violations of a parsed file."""
    out = []
    size = len(pe.raw)
    fa, sa = pe.file_alignment, pe.section_alignment

    if sa < fa:
        out.append(
            Violation(
                "alignment-order",
                f"Section alignment {sa} is smaller than file alignment {fa}.",
                None,
            )
        )

    if pe.size_of_headers % fa:
        out.append(
            Violation(
                "headers-alignment",
                f"Size of headers 0x{pe.size_of_headers:x} is not a multiple of {fa}.",
                None,
            )
        )

    if pe.section_table_end > pe.size_of_headers:
        out.append(
            Violation(
                "section-table-bounds",
                "Section table extends beyond the size of headers.",
                pe.section_table_offset,
            )
        )

    if len(pe.sections) != pe.num_sections:
        out.append(
            Violation(
                "section-count",
                f"Section table holds {len(pe.sections)} readable entries, "
                f"{pe.num_sections} declared.",
                pe.section_table_offset,
            )
        )

    if pe.signed:
        out.append(
            Violation(
                "signed-binary",
                "File carries a certificate directory.",
                pe.security[0],
            )
        )

    # Section raw layout
    table = pe.section_table_offset
    for i, section in enumerate(pe.sections):
        offset = table + 40 * i
        name = section.label

        if section.raw_pointer % fa or section.raw_size % fa:
            out.append(
                Violation(
                    "raw-alignment",
                    f"Section '{name}' raw pointer or size is not a multiple of {fa}.",
                    offset,
                )
            )

        if section.virtual_address % sa:
            out.append(
                Violation(
                    "virtual-alignment",
                    f"Section '{name}' virtual address is not a multiple of {sa}.",
                    offset,
                )
            )

        if section.raw_size and section.raw_end > size:
            out.append(
                Violation(
                    "raw-bounds",
                    f"Section '{name}' raw data exceeds file size.",
                    offset,
                )
            )

        if section.raw_size and section.raw_pointer < pe.size_of_headers:
            out.append(
                Violation(
                    "raw-overlap",
                    f"Section '{name}' raw data overlaps the headers.",
                    offset,
                )
            )

    raw_sections = pe.raw_sections
    for s1, s2 in zip(raw_sections, raw_sections[1:]):
        if s2.raw_pointer < s1.raw_end:
            out.append(
                Violation(
                    "raw-overlap",
                    f"Sections '{s1.label}' and '{s2.label}' overlap in file.",
                    s2.raw_pointer,
                )
            )

    # Virtual layout
    virtual_sections = sorted(pe.sections, key=lambda s: s.virtual_address)
    for s1, s2 in zip(virtual_sections, virtual_sections[1:]):
        if s2.virtual_address < s1.virtual_end:
            out.append(
                Violation(
                    "virtual-overlap",
                    f"Sections '{s1.label}' and '{s2.label}' overlap in memory.",
                    None,
                )
            )

    if virtual_sections:
        first = virtual_sections[0].virtual_address
        if pe.size_of_headers > first:
            out.append(
                Violation(
                    "header-budget",
                    f"Size of headers 0x{pe.size_of_headers:x} exceeds first section "
                    f"virtual address 0x{first:x}.",
                    None,
                )
            )

        end = max(s.virtual_end for s in virtual_sections)
        if pe.size_of_image < end or pe.size_of_image % sa:
            out.append(
                Violation(
                    "image-size",
                    f"Size of image 0x{pe.size_of_image:x} does not cover sections "
                    f"(end 0x{end:x}) or is not aligned to {sa}.",
                    None,
                )
            )

    return out
