import collections

import numpy as np

from .._exceptions import (
    InvalidInput,
    LengthMismatch,
    ManipulationError,
    OverlapError,
    SignedBinary,
)
from .._pe import parse, validate
from .._pe._common import DOS_HEADER_SIZE, HEADER_OFFSET_FIELD
from .._pe._regions import merge_intervals, shift_intervals, total_length

__all__ = [
    "Patchable",
    "SectionPayload",
    "apply_bytes",
    "combine",
    "region_bytes",
]


# DOS magic and header offset field are never editable
PROTECTED = ((0, 2), (HEADER_OFFSET_FIELD, DOS_HEADER_SIZE))


class Patchable(
    collections.namedtuple("Patchable", ["bytes", "editable", "origin"])
):
    __slots__ = ()

    @property
    def size(self):
        """Return total number of editable bytes."""
        return total_length(self.editable)

    @property
    def positions(self):
        """Return editable byte offsets in order."""
        if not self.editable:
            return np.empty(0, dtype=np.int64)

        return np.concatenate([np.arange(s, e) for s, e in self.editable])

    @property
    def manipulation(self):
        """Return identifier of the manipulation(s) that produced this buffer."""
        return self.origin["manipulation"]

    @property
    def inserted(self):
        """Return list of (offset, length) insertions performed by the rewrite."""
        return self.origin.get("inserted", [])


class SectionPayload(
    collections.namedtuple(
        "SectionPayload", ["content", "source_name", "source_sample"]
    )
):
    __slots__ = ()

    def __new__(cls, content, source_name=b".data", source_sample=""):
        """Benign content harvested from a section of a goodware program."""
        content = bytes(content)
        if not content:
            raise ValueError("Payload content is empty.")

        if isinstance(source_name, str):
            source_name = source_name.encode("latin-1")
        source_name = source_name.rstrip(b"\x00")[:8].ljust(8, b"\x00")

        return super().__new__(cls, content, source_name, str(source_sample))

    @property
    def name(self):
        """Return section name as a string."""
        return self.source_name.rstrip(b"\x00").decode("latin-1")


def load(data):
    """Parse a buffer that manipulations are allowed to rewrite."""
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise TypeError()
    data = bytes(data)

    report = validate(data)
    if not report.ok:
        if "signed-binary" in report.rules:
            raise SignedBinary("Signed binaries cannot be manipulated.")

        raise InvalidInput(f"Invalid PE file:\n{report}")

    return parse(data)


def make_patchable(data, editable, manipulation, params=None, inserted=None):
    """Build a Patchable and check its invariants."""
    editable = [(int(s), int(e)) for s, e in editable if e > s]
    editable = merge_intervals(editable)

    if editable and (editable[0][0] < 0 or editable[-1][1] > len(data)):
        raise ManipulationError("Editable region out of bounds.")

    for start, end in editable:
        for pstart, pend in PROTECTED:
            if start < pend and pstart < end:
                raise ManipulationError(
                    f"Editable region [0x{start:x}, 0x{end:x}) overlaps "
                    "a protected field."
                )

    report = validate(data)
    if not report.ok:
        raise ManipulationError(
            f"Manipulation '{manipulation}' broke the file:\n{report}"
        )

    origin = {
        "manipulation": manipulation,
        "params": dict(params) if params else {},
        "inserted": list(inserted) if inserted else [],
    }

    return Patchable(bytes(data), tuple(editable), origin)


def apply_bytes(patchable, values):
    """
    Write values into the editable regions of a buffer.

    Parameters
    ----------
    patchable : Patchable
        Manipulated buffer.
    values : bytes, bytearray or array_like
        New content, one byte per editable position, in interval order.

    Returns
    -------
    bytes
        Updated buffer. Bytes outside editable regions are untouched.

    """
    if not isinstance(patchable, Patchable):
        raise TypeError()

    if isinstance(values, (bytes, bytearray, memoryview)):
        values = np.frombuffer(bytes(values), dtype=np.uint8)
    else:
        values = np.asarray(values)
        if values.size and (values.min() < 0 or values.max() > 255):
            raise ValueError("Byte values must be in [0, 255].")
        values = values.astype(np.uint8)

    if values.ndim != 1 or len(values) != patchable.size:
        raise LengthMismatch(
            f"Expected {patchable.size} values, got {values.size}."
        )

    if not patchable.size:
        return patchable.bytes

    out = np.frombuffer(patchable.bytes, dtype=np.uint8).copy()
    out[patchable.positions] = values

    return out.tobytes()


def region_bytes(patchable):
    """Return current content of the editable regions, in interval order."""
    return b"".join(patchable.bytes[s:e] for s, e in patchable.editable)


def combine(a, b):
    """
    Merge the editable regions of two rewrites of the same file.

    Parameters
    ----------
    a : Patchable
        First rewrite. Its intervals must be valid in `b.bytes`.
    b : Patchable
        Second rewrite, applied on top of `a.bytes`.

    Returns
    -------
    Patchable
        Buffer of `b` with the union of both editable sets.

    """
    if not (isinstance(a, Patchable) and isinstance(b, Patchable)):
        raise TypeError()

    try:
        editable = merge_intervals(a.editable, b.editable)

    except OverlapError:
        raise OverlapError(
            f"Editable regions of '{a.manipulation}' and '{b.manipulation}' intersect."
        )

    return make_patchable(
        b.bytes,
        editable,
        f"{a.manipulation}+{b.manipulation}",
        params={"parts": [a.origin, b.origin]},
        inserted=a.inserted + b.inserted,
    )


def remap(patchable, inserted, data):
    """Move the editable regions of a Patchable through byte insertions."""
    editable = list(patchable.editable)
    for at, amount in inserted:
        editable = shift_intervals(editable, at, amount)

    return patchable._replace(bytes=data, editable=tuple(editable))
