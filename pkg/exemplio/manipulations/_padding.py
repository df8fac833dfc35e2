from .._pe import locate_slack
from ._common import load, make_patchable
from ._helpers import chain

__all__ = [
    "padding",
    "slack_fill",
    "slack_padding",
]


def padding(data, n=0):
    """
    Append bytes at the end of the file.

    Parameters
    ----------
    data : bytes
        Program content.
    n : int, optional, default 0
        Number of zero bytes to append.

    Returns
    -------
    Patchable
        Extended buffer whose editable region is the appended tail.

    """
    if not isinstance(n, int):
        raise TypeError()
    if n < 0:
        raise ValueError(f"Padding size must be non-negative, got {n}.")

    load(data)
    size = len(data)

    return make_patchable(
        bytes(data) + bytes(n), [(size, size + n)], "padding", params={"n": n}
    )


def slack_fill(data):
    """
    Grant the slack space of every section.

    Parameters
    ----------
    data : bytes
        Program content.

    Returns
    -------
    Patchable
        Unchanged buffer whose editable regions are the section slacks.

    """
    pe = load(data)

    return make_patchable(data, locate_slack(pe, data), "slack_fill")


def slack_padding(data, n=0):
    """
    Grant section slack space and an appended tail of `n` bytes.

    Parameters
    ----------
    data : bytes
        Program content.
    n : int, optional, default 0
        Number of zero bytes to append.

    Returns
    -------
    Patchable
        Combined rewrite.

    """
    return chain(slack_fill(data), "padding", n=n)
