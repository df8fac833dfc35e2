import fnmatch
import logging
import os

from .._exceptions import NoPayloadsFound
from .._pe import parse, validate
from ..manipulations import SectionPayload

__all__ = [
    "harvest_sections",
]


def harvest_sections(goodware_dir, section_name_filter=".data", max_count=100):
    """
    Extract section contents from benign programs.

    Parameters
    ----------
    goodware_dir : str or pathlike
        Directory holding benign programs. Files that are not valid programs
        are skipped.
    section_name_filter : str, optional, default '.data'
        Section name or shell-style pattern.
    max_count : int, optional, default 100
        Maximum number of payloads.

    Returns
    -------
    list of SectionPayload
        Payloads ordered by file name, then section index.

    """
    if max_count < 1:
        raise ValueError("Maximum count must be at least 1.")

    filenames = sorted(
        f
        for f in os.listdir(goodware_dir)
        if os.path.isfile(os.path.join(goodware_dir, f))
    )

    payloads = []
    for filename in filenames:
        with open(os.path.join(goodware_dir, filename), "rb") as f:
            data = f.read()

        report = validate(data)
        if not report.ok:
            logging.warning(f"Skipping '{filename}' (not a valid program).")
            continue

        pe = parse(data)
        for section in pe.sections:
            if not fnmatch.fnmatchcase(section.label, section_name_filter):
                continue

            content = pe.section_content(section)
            if content:
                payloads.append(SectionPayload(content, section.name, filename))

            if len(payloads) == max_count:
                return payloads

    if not payloads:
        raise NoPayloadsFound(
            f"No section matching '{section_name_filter}' in '{goodware_dir}'."
        )

    return payloads
