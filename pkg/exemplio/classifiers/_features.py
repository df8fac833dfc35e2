import numpy as np

from .._exceptions import InvalidInput
from .._pe import parse, validate

__all__ = [
    "extract_features",
    "feature_names",
    "byte_histogram",
]


MAX_SECTIONS = 8

header_features = (
    "num_sections",
    "size_of_headers",
    "file_length",
    "overlay_length",
)


def feature_names():
    """Return the names of the static features, in vector order."""
    return (
        [f"histogram_{i:02x}" for i in range(256)]
        + [f"entropy_{i}" for i in range(MAX_SECTIONS)]
        + list(header_features)
    )


def byte_histogram(data):
    """Return byte histogram normalized to unit mass."""
    b = np.frombuffer(bytes(data), dtype=np.uint8)
    counts = np.bincount(b, minlength=256).astype(np.float64)

    return counts / max(len(b), 1)


def entropy(data):
    """Return Shannon entropy of a byte string scaled to [0, 1]."""
    if not len(data):
        return 0.0

    p = byte_histogram(data)
    p = p[p > 0.0]

    return float(-(p * np.log2(p)).sum() / 8.0)


def extract_features(data):
    """
    Compute the static feature vector of a program.

    The vector concatenates the normalized whole-file byte histogram (256),
    the entropy of the content of the first sections (8, zero when absent),
    and header scalars (number of sections, size of headers, file length,
    overlay length).

    Parameters
    ----------
    data : bytes
        Program content.

    Returns
    -------
    array_like
        Feature vector, values representable in single precision.

    """
    report = validate(data)
    if not report.ok:
        raise InvalidInput(f"Invalid program:\n{report}")

    pe = parse(data)
    entropies = np.zeros(MAX_SECTIONS)
    for i, section in enumerate(pe.sections[:MAX_SECTIONS]):
        entropies[i] = entropy(pe.section_content(section))

    start, end = pe.overlay
    scalars = np.array(
        [pe.num_sections, pe.size_of_headers, len(pe.raw), end - start],
        dtype=np.float64,
    )
    out = np.concatenate((byte_histogram(data), entropies, scalars))

    return out.astype(np.float32).astype(np.float64)
