import math

from .._exceptions import NoHeaderRoom
from .._pe import align_up, header_room
from .._pe._common import SECTION_HEADER_SIZE, SectionEntry
from .._pe._parse import load_image, pack_section
from .._pe._synth import IMAGE_SCN_CNT_INITIALIZED_DATA, IMAGE_SCN_MEM_READ
from ._common import SectionPayload, load, make_patchable

__all__ = [
    "inject_section",
    "payload_slice_length",
]


def payload_slice_length(payload, fraction):
    """Return number of payload bytes injected for a given fraction."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"Fraction must be in [0, 1], got {fraction}.")

    # Rounding guards against 0.3 * 1000 = 300.00000000000006
    size = len(payload.content)
    return min(math.ceil(round(fraction * size, 9)), size)


def inject_section(data, payload, fraction=1.0):
    """
    Append a new section filled with (part of) a benign payload.

    Parameters
    ----------
    data : bytes
        Program content.
    payload : SectionPayload
        Benign section content.
    fraction : scalar, optional, default 1.0
        Fraction of the payload to inject, in [0, 1].

    Returns
    -------
    Patchable
        Rewritten buffer. No byte is editable: the content is fixed by the
        payload. A fraction yielding no byte returns the input unchanged.

    """
    if not isinstance(payload, SectionPayload):
        raise TypeError()

    pe = load(data)
    n = payload_slice_length(payload, fraction)
    params = {"fraction": float(fraction), "length": n}
    if not n:
        return make_patchable(data, [], "inject_section", params=params)

    if header_room(pe) < 1:
        raise NoHeaderRoom("No room left in the headers for a new section entry.")

    # The slot of the new entry must be free
    slot = pe.section_table_end
    end = slot + SECTION_HEADER_SIZE
    if any(pe.raw[slot:end]):
        raise NoHeaderRoom(f"Bytes after the section table at 0x{slot:x} are in use.")
    for address, size in pe.directories:
        if size and address < end and slot < address + size:
            raise NoHeaderRoom(
                f"A data directory at 0x{address:x} overlaps the new section entry."
            )

    content = payload.content[:n]
    raw_size = align_up(n, pe.file_alignment)
    at = pe.overlay[0]

    virtual_end = max((s.virtual_end for s in pe.sections), default=pe.size_of_headers)
    virtual_address = align_up(virtual_end, pe.section_alignment)
    section = SectionEntry(
        name=payload.source_name,
        virtual_address=virtual_address,
        virtual_size=n,
        raw_pointer=at,
        raw_size=raw_size,
        characteristics=IMAGE_SCN_CNT_INITIALIZED_DATA | IMAGE_SCN_MEM_READ,
    )

    image = load_image(pe.raw)
    image.FILE_HEADER.NumberOfSections += 1
    image.OPTIONAL_HEADER.SizeOfImage = align_up(
        section.virtual_end, pe.section_alignment
    )
    image.set_bytes_at_offset(slot, pack_section(section))
    data = image.write()
    raw = bytes(data[:at]) + content.ljust(raw_size, b"\x00") + bytes(data[at:])

    return make_patchable(
        raw, [], "inject_section", params=params, inserted=[(at, raw_size)]
    )
