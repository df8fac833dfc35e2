import os

from .._common import check_keys, read_json, write_json
from ._common import SectionPayload

__all__ = [
    "read_payloads",
    "write_payloads",
]


index_keys = {"file", "source_sample", "section_name", "length"}


def write_payloads(dirname, payloads):
    """
    Write a payload store.

    Parameters
    ----------
    dirname : str or pathlike
        Output directory (created if needed).
    payloads : list of SectionPayload
        Payloads to store. Content goes to one `.bin` file per payload,
        provenance to `index.json`.

    """
    os.makedirs(dirname, exist_ok=True)

    index = []
    for i, payload in enumerate(payloads):
        filename = f"{i:04d}.bin"
        with open(os.path.join(dirname, filename), "wb") as f:
            f.write(payload.content)

        index.append(
            {
                "file": filename,
                "source_sample": payload.source_sample,
                "section_name": payload.name,
                "length": len(payload.content),
            }
        )

    write_json(os.path.join(dirname, "index.json"), index)


def read_payloads(dirname):
    """
    Read a payload store.

    Parameters
    ----------
    dirname : str or pathlike
        Directory holding `index.json` and `.bin` files.

    Returns
    -------
    list of SectionPayload
        Payloads in index order.

    """
    index = read_json(os.path.join(dirname, "index.json"))

    payloads = []
    for i, entry in enumerate(index):
        check_keys(entry, index_keys, f"index.json[{i}]")

        with open(os.path.join(dirname, entry["file"]), "rb") as f:
            content = f.read()

        if len(content) != entry["length"]:
            raise ValueError(
                f"Payload '{entry['file']}' holds {len(content)} bytes, "
                f"index says {entry['length']}."
            )

        payloads.append(
            SectionPayload(content, entry["section_name"], entry["source_sample"])
        )

    return payloads
