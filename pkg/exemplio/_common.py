import json
import os
from contextlib import contextmanager

import numpy as np

from ._exceptions import ConfigError


def register_format(
    fmt, ext_to_fmt, reader_map, writer_map, extensions, reader, writer
):
    """Register a new format."""
    for ext in extensions:
        ext_to_fmt[ext] = fmt

    if reader is not None:
        reader_map[fmt] = reader

    if writer is not None:
        writer_map[fmt] = writer


def filetype_from_filename(filename, ext_to_fmt, default=""):
    """Determine file type from its extension."""
    ext = os.path.splitext(filename)[1].lower()

    return ext_to_fmt[ext] if ext in ext_to_fmt else default


@contextmanager
def open_file(path_or_buffer, mode):
    """Open file or buffer."""

    def is_buffer(obj, mode):
        return ("r" in mode and hasattr(obj, "read")) or (
            "w" in mode and hasattr(obj, "write")
        )

    if is_buffer(path_or_buffer, mode):
        yield path_or_buffer

    else:
        with open(path_or_buffer, mode) as f:
            yield f


def jsonify(x):
    """JSON serialize data."""
    if isinstance(x, (np.integer,)):
        return int(x)
    elif isinstance(x, (np.floating,)):
        return float(x)
    elif isinstance(x, (list, tuple)):
        return [jsonify(xx) for xx in x]
    elif isinstance(x, np.ndarray):
        return x.tolist()
    elif isinstance(x, dict):
        return {k: jsonify(v) for k, v in x.items()}
    else:
        return x


def read_json(filename_or_dict):
    """Load a JSON document from a file name, a buffer or an already parsed dict."""
    if isinstance(filename_or_dict, dict):
        return filename_or_dict

    with open_file(filename_or_dict, "r") as f:
        try:
            return json.load(f)

        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON document: {e}.")


def write_json(filename, data):
    """Write a JSON document with a stable layout."""
    with open_file(filename, "w") as f:
        json.dump(jsonify(data), f, indent=2)
        f.write("\n")


def check_keys(data, allowed, where=""):
    """Raise if a configuration mapping holds keys outside of `allowed`."""
    if not isinstance(data, dict):
        raise ConfigError(f"Expected a mapping{f' in {where}' if where else ''}.")

    unknown = sorted(set(data) - set(allowed))
    if unknown:
        keys = ", ".join(f"'{k}'" for k in unknown)
        raise ConfigError(f"Unknown key(s) {keys}{f' in {where}' if where else ''}.")
