from .._exceptions import OverlapError, ZeroAlignment
from ._common import SECTION_HEADER_SIZE

__all__ = [
    "align_up",
    "is_power_of_two",
    "locate_slack",
    "locate_overlay",
    "header_room",
]


def is_power_of_two(value):
    """Return `True` if `value` is a positive power of two."""
    return isinstance(value, int) and value > 0 and not (value & (value - 1))


def align_up(value, alignment):
    """
    Round a value up to the next multiple of an alignment.

    Parameters
    ----------
    value : int
        Non-negative value to align.
    alignment : int
        Power-of-two alignment.

    Returns
    -------
    int
        Smallest multiple of `alignment` greater than or equal to `value`.

    """
    if alignment == 0:
        raise ZeroAlignment("Alignment must be positive.")
    if not is_power_of_two(alignment):
        raise ValueError(f"Alignment {alignment} is not a power of two.")
    if value < 0:
        raise ValueError()

    return (value + alignment - 1) & ~(alignment - 1)


def locate_slack(pe, data=None):
    """
    Locate slack space of every section.

    Parameters
    ----------
    pe : ParsedPe
        Parsed file.
    data : bytes or None, optional, default None
        Raw bytes `pe` was parsed from. Defaults to `pe.raw`.

    Returns
    -------
    list of tuple
        Sorted, disjoint (start, end) intervals between each section's content
        end and its raw end.

    """
    size = len(data) if data is not None else len(pe.raw)

    out = []
    for section in pe.raw_sections:
        start, end = section.content_end, min(section.raw_end, size)
        if start < end:
            out.append((start, end))

    return sorted(out)


def locate_overlay(pe, data=None):
    """
    Locate overlay (bytes after last section raw data).

    Parameters
    ----------
    pe : ParsedPe
        Parsed file.
    data : bytes or None, optional, default None
        Raw bytes `pe` was parsed from. Defaults to `pe.raw`.

    Returns
    -------
    tuple
        (start, end) interval, possibly empty.

    """
    size = len(data) if data is not None else len(pe.raw)
    start = overlay_start(pe.sections, pe.size_of_headers, size)

    return start, size


def overlay_start(sections, size_of_headers, size):
    """Return first byte after every section raw data."""
    ends = [s.raw_end for s in sections if s.raw_size > 0]
    start = max(ends) if ends else size_of_headers

    return min(start, size)


def header_room(pe):
    """Return number of section headers that fit before the end of the headers."""
    limit = pe.size_of_headers
    raw_sections = pe.raw_sections
    if raw_sections:
        limit = min(limit, raw_sections[0].raw_pointer)

    return max(limit - pe.section_table_end, 0) // SECTION_HEADER_SIZE


def total_length(intervals):
    """Return total number of bytes covered by intervals."""
    return sum(end - start for start, end in intervals)


def merge_intervals(*groups):
    """
    Merge groups of disjoint intervals into one sorted list.

    Empty intervals are dropped. Raise if two intervals intersect.

    """
    intervals = sorted((s, e) for group in groups for s, e in group if e > s)
    for (_, e1), (s2, _) in zip(intervals, intervals[1:]):
        if s2 < e1:
            raise OverlapError(f"Intervals intersect at offset 0x{s2:x}.")

    return intervals


def shift_intervals(intervals, at, amount):
    """Move intervals starting at or after `at` by `amount` bytes."""
    out = []
    for start, end in intervals:
        if start >= at:
            out.append((start + amount, end + amount))
        elif end > at:
            raise OverlapError(f"Interval straddles insertion point 0x{at:x}.")
        else:
            out.append((start, end))

    return out
