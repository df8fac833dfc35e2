from .._exceptions import HeaderBudgetExceeded, InvalidInput, MisalignedAmount
from .._pe._parse import load_image
from ._common import load, make_patchable

__all__ = [
    "extend",
    "shift",
]


def extend(data, amount):
    """
    Enlarge the DOS header by moving the PE header further into the file.

    Parameters
    ----------
    data : bytes
        Program content.
    amount : int
        Number of bytes to insert in front of the PE header. Must be a
        positive multiple of the file alignment.

    Returns
    -------
    Patchable
        Rewritten buffer whose editable region is the new gap
        [old header offset, old header offset + amount).

    """
    pe = load(data)

    return _insert(pe, pe.header_offset, amount, "extend", move_header=True)


def shift(data, amount):
    """
    Insert room in front of the first section by shifting every section.

    Parameters
    ----------
    data : bytes
        Program content.
    amount : int
        Number of bytes to insert. Must be a positive multiple of the file
        alignment.

    Returns
    -------
    Patchable
        Rewritten buffer whose editable region is
        [old first raw pointer, old first raw pointer + amount).

    """
    pe = load(data)
    raw_sections = pe.raw_sections
    if not raw_sections:
        raise InvalidInput("File has no section with raw data.")

    return _insert(pe, raw_sections[0].raw_pointer, amount, "shift", move_header=False)


def _insert(pe, at, amount, manipulation, move_header):
    """Insert zeros at `at` and update the headers pointing past it."""
    if not isinstance(amount, int):
        raise TypeError()
    if amount <= 0 or amount % pe.file_alignment:
        raise MisalignedAmount(
            f"Amount {amount} is not a positive multiple of the file alignment "
            f"{pe.file_alignment}."
        )

    size_of_headers = pe.size_of_headers + amount
    if pe.sections:
        first = min(s.virtual_address for s in pe.sections)
        if size_of_headers > first:
            raise HeaderBudgetExceeded(
                f"Size of headers 0x{size_of_headers:x} would exceed first section "
                f"virtual address 0x{first:x}."
            )

    # Fields are updated in place, then the headers past `at` move with the splice
    image = load_image(pe.raw)
    if move_header:
        image.DOS_HEADER.e_lfanew += amount
    image.OPTIONAL_HEADER.SizeOfHeaders = size_of_headers
    for section in image.sections:
        if section.SizeOfRawData and section.PointerToRawData >= at:
            section.PointerToRawData += amount

    data = image.write()
    raw = bytes(data[:at]) + bytes(amount) + bytes(data[at:])

    return make_patchable(
        raw,
        [(at, at + amount)],
        manipulation,
        params={"amount": amount},
        inserted=[(at, amount)],
    )
