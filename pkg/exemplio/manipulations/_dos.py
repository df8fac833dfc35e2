from .._pe._common import DOS_HEADER_SIZE, HEADER_OFFSET_FIELD
from ._common import load, make_patchable

__all__ = [
    "partial_dos",
    "full_dos",
]


def partial_dos(data):
    """
    Grant the unused bytes of the DOS header.

    Parameters
    ----------
    data : bytes
        Program content.

    Returns
    -------
    Patchable
        Unchanged buffer with editable region [2, 0x3C).

    """
    load(data)

    return make_patchable(data, [(2, HEADER_OFFSET_FIELD)], "partial_dos")


def full_dos(data):
    """
    Grant the unused DOS header bytes and the whole DOS stub.

    Parameters
    ----------
    data : bytes
        Program content.

    Returns
    -------
    Patchable
        Unchanged buffer with editable regions [2, 0x3C) and
        [0x40, header offset). The second one is empty (and dropped) when the
        PE header directly follows the DOS header.

    """
    pe = load(data)
    editable = [(2, HEADER_OFFSET_FIELD), (DOS_HEADER_SIZE, pe.header_offset)]

    return make_patchable(data, editable, "full_dos")
