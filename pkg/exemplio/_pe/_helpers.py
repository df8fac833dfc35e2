import os

from ._common import LABELS, RawExe

__all__ = [
    "read_exe",
    "write_exe",
]


def read_exe(filename, label="malicious", sample_id=None):
    """
    Ingest a program from disk.

    Parameters
    ----------
    filename : str or pathlike
        Program file name.
    label : str ('benign', 'malicious'), optional, default 'malicious'
        Class of the program.
    sample_id : str or None, optional, default None
        Sample identifier. Defaults to the file name without directory.

    Returns
    -------
    RawExe
        namedtuple (bytes, sample_id, label).

    """
    if label not in LABELS:
        raise ValueError(f"Unknown label '{label}'.")

    with open(filename, "rb") as f:
        data = f.read()

    if not data:
        raise ValueError(f"File '{filename}' is empty.")

    sample_id = sample_id if sample_id is not None else os.path.basename(filename)

    return RawExe(data, sample_id, label)


def write_exe(filename, data):
    """
    Write program bytes to disk.

    Parameters
    ----------
    filename : str or pathlike
        Output file name.
    data : bytes, bytearray or RawExe
        Program content.

    """
    data = data.bytes if isinstance(data, RawExe) else data

    with open(filename, "wb") as f:
        f.write(bytes(data))
