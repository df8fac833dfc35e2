import struct

import pefile

from .._exceptions import (
    BadAlignment,
    BadDosMagic,
    BadHeaderOffset,
    BadSignature,
    ParseError,
    TruncatedFile,
)
from ._common import (
    DOS_HEADER_SIZE,
    DOS_MAGIC,
    HEADER_OFFSET_FIELD,
    MIN_HEADER_SIZE,
    OPT_MIN_SIZE,
    PE_SIGNATURE,
    SECTION_HEADER_SIZE,
    SECURITY_DIRECTORY,
    ParsedPe,
    SectionEntry,
    optional_magic_to_format,
)
from ._regions import is_power_of_two, overlay_start

__all__ = [
    "parse",
    "serialize",
    "load_image",
    "pack_section",
]


# pefile error messages, matched by prefix
pefile_errors = {
    "Unable to read the DOS Header": TruncatedFile,
    "DOS Header magic not found": BadDosMagic,
    "Probably a ZM Executable": BadDosMagic,
    "Invalid e_lfanew": BadHeaderOffset,
    "NT Headers not found": BadSignature,
    "Invalid NT Headers signature": BadSignature,
    "File Header missing": TruncatedFile,
    "No Optional Header found": BadSignature,
    "Data length less than expected": TruncatedFile,
}


def load_image(data):
    """
    Decode the headers of a PE file with pefile.

    Parameters
    ----------
    data : bytes
        File content.

    Returns
    -------
    pefile.PE
        Headers and section table only (data directories are not walked).

    """
    try:
        return pefile.PE(data=bytes(data), fast_load=True)

    except pefile.PEFormatError as e:
        message = str(getattr(e, "value", e))
        for prefix, error in pefile_errors.items():
            if message.startswith(prefix):
                raise error(message)

        raise ParseError(message)

    except (struct.error, IndexError, KeyError, OverflowError, ValueError) as e:
        raise ParseError(f"Unreadable headers: {e}")


def _check_layout(data):
    """Check the fields locating the PE header before decoding it."""
    size = len(data)
    if size < len(DOS_MAGIC):
        raise TruncatedFile("File is too short to hold a DOS header.", 0)
    if data[:2] != DOS_MAGIC:
        raise BadDosMagic(f"Invalid DOS magic {data[:2]!r}.", 0)
    if size < DOS_HEADER_SIZE:
        raise TruncatedFile("File is too short to hold a DOS header.", size)

    header_offset = int.from_bytes(data[HEADER_OFFSET_FIELD:DOS_HEADER_SIZE], "little")
    if header_offset < DOS_HEADER_SIZE or header_offset + MIN_HEADER_SIZE > size:
        raise BadHeaderOffset(
            f"Header offset 0x{header_offset:x} is out of range.", HEADER_OFFSET_FIELD
        )

    if data[header_offset : header_offset + 4] != PE_SIGNATURE:
        raise BadSignature("Invalid PE signature.", header_offset)

    opt = header_offset + MIN_HEADER_SIZE
    if opt + OPT_MIN_SIZE > size:
        raise TruncatedFile("Optional header exceeds file size.", opt)


def parse(data):
    """
    Parse the structure of a PE file.

    Only the fields manipulations rely on are decoded. Everything else is kept
    verbatim in `raw` so that :func:`serialize` restores the exact input.

    Parameters
    ----------
    data : bytes or bytearray
        File content.

    Returns
    -------
    ParsedPe
        Structured view of the file.

    """
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise TypeError()
    data = bytes(data)
    size = len(data)

    _check_layout(data)
    image = load_image(data)
    header_offset = image.DOS_HEADER.e_lfanew
    file_header = image.FILE_HEADER
    optional_header = image.OPTIONAL_HEADER

    # Optional header
    opt = header_offset + MIN_HEADER_SIZE
    size_of_optional_header = file_header.SizeOfOptionalHeader
    if size_of_optional_header < OPT_MIN_SIZE:
        raise TruncatedFile(
            "Optional header is too small.",
            file_header.get_field_absolute_offset("SizeOfOptionalHeader"),
        )
    if opt + size_of_optional_header > size:
        raise TruncatedFile("Optional header exceeds file size.", opt)

    magic = optional_header.Magic
    if magic not in optional_magic_to_format:
        raise BadSignature(f"Unknown optional header magic 0x{magic:x}.", opt)

    for name in ("FileAlignment", "SectionAlignment"):
        value = getattr(optional_header, name)
        if not is_power_of_two(value):
            raise BadAlignment(
                f"{name[:-9]} alignment {value} is not a power of two.",
                optional_header.get_field_absolute_offset(name),
            )

    # Section table
    table = opt + size_of_optional_header
    num_sections = file_header.NumberOfSections
    if table + SECTION_HEADER_SIZE * num_sections > size:
        raise TruncatedFile("Section table exceeds file size.", table)

    # pefile stops at the first null entry and may reorder sections
    sections = tuple(
        SectionEntry(
            name=s.Name,
            virtual_address=s.VirtualAddress,
            virtual_size=s.Misc_VirtualSize,
            raw_pointer=s.PointerToRawData,
            raw_size=s.SizeOfRawData,
            characteristics=s.Characteristics,
        )
        for s in sorted(image.sections, key=lambda s: s.get_file_offset())
    )
    directories = tuple(
        (d.VirtualAddress, d.Size)
        for d in optional_header.DATA_DIRECTORY
        if d.get_file_offset() + 8 <= table
    )
    security = (
        directories[SECURITY_DIRECTORY]
        if len(directories) > SECURITY_DIRECTORY
        else (0, 0)
    )
    size_of_headers = optional_header.SizeOfHeaders

    return ParsedPe(
        raw=data,
        dos_magic=data[:2],
        header_offset=header_offset,
        machine=file_header.Machine,
        pe_format=optional_magic_to_format[magic],
        num_sections=num_sections,
        size_of_optional_header=size_of_optional_header,
        entry_point=optional_header.AddressOfEntryPoint,
        file_alignment=optional_header.FileAlignment,
        section_alignment=optional_header.SectionAlignment,
        size_of_image=optional_header.SizeOfImage,
        size_of_headers=size_of_headers,
        security=security,
        sections=sections,
        overlay=(overlay_start(sections, size_of_headers, size), size),
        directories=directories,
    )


def pack_section(section):
    """Return the 40-byte header of a section."""
    return struct.pack(
        "<8s6I2HI",
        section.name.ljust(8, b"\x00")[:8],
        section.virtual_size,
        section.virtual_address,
        section.raw_size,
        section.raw_pointer,
        0,
        0,
        0,
        0,
        section.characteristics,
    )


def serialize(pe):
    """
    Write the structured fields of a parsed file back into its raw buffer.

    Parameters
    ----------
    pe : ParsedPe
        Parsed (and possibly updated) file. The PE header must still lie at
        `header_offset` in `raw`: moving it is a byte splice, not a field
        update.

    Returns
    -------
    bytes
        File content.

    """
    if not isinstance(pe, ParsedPe):
        raise TypeError()

    image = load_image(pe.raw)
    if image.DOS_HEADER.e_lfanew != pe.header_offset:
        raise ValueError("Header offset differs from the one of the raw buffer.")

    image.DOS_HEADER.e_magic = int.from_bytes(pe.dos_magic, "little")
    image.FILE_HEADER.Machine = pe.machine
    image.FILE_HEADER.NumberOfSections = pe.num_sections
    image.FILE_HEADER.SizeOfOptionalHeader = pe.size_of_optional_header

    optional_header = image.OPTIONAL_HEADER
    optional_header.AddressOfEntryPoint = pe.entry_point
    optional_header.SectionAlignment = pe.section_alignment
    optional_header.FileAlignment = pe.file_alignment
    optional_header.SizeOfImage = pe.size_of_image
    optional_header.SizeOfHeaders = pe.size_of_headers

    headers = sorted(image.sections, key=lambda s: s.get_file_offset())
    for header, section in zip(headers, pe.sections):
        header.Name = section.name.ljust(8, b"\x00")[:8]
        header.Misc_VirtualSize = section.virtual_size
        header.VirtualAddress = section.virtual_address
        header.SizeOfRawData = section.raw_size
        header.PointerToRawData = section.raw_pointer
        header.Characteristics = section.characteristics

    # Entries pefile did not decode are written by hand
    table = pe.section_table_offset
    for i in range(len(headers), len(pe.sections)):
        image.set_bytes_at_offset(
            table + i * SECTION_HEADER_SIZE, pack_section(pe.sections[i])
        )

    return bytes(image.write())
