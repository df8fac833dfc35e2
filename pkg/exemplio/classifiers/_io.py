import json
import struct

import numpy as np

from .._common import jsonify, open_file
from .._exceptions import ModelFormatError
from ._byte_cnn import ByteCnn, param_names
from ._trees import RegressionTree, TreeEnsemble, tree_fields

__all__ = [
    "register",
    "read_model",
    "write_model",
]


MAGIC = b"EXMD"
VERSION = 1

dtype_to_code = {"float32": b"f", "int32": b"i"}
code_to_dtype = {v: np.dtype(f"<{k[0]}4") for k, v in dtype_to_code.items()}

_model_map = {}


def register(kind, reader, writer):
    """
    Register a new model kind.

    Parameters
    ----------
    kind : str
        Model kind identifier written in file headers.
    reader : callable
        Build a model from (arrays, hyperparameters, threshold).
    writer : callable
        Convert a model to a dict of named arrays.

    """
    _model_map[kind] = (reader, writer)


def write_model(filename, model):
    """
    Write a classifier to a model file.

    Parameters
    ----------
    filename : str, pathlike or buffer
        Output file name or binary buffer.
    model : BaseClassifier
        Classifier to write. Floating point parameters are stored as float32,
        integer arrays as int32.

    """
    if model.kind not in _model_map:
        raise ModelFormatError(f"Unknown model kind '{model.kind}'.")

    _, writer = _model_map[model.kind]
    arrays = writer(model)
    header = {
        "kind": model.kind,
        "threshold": model.threshold,
        "hyperparameters": model.hyperparameters,
    }
    header = json.dumps(jsonify(header), sort_keys=True).encode()

    with open_file(filename, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<HI", VERSION, len(header)))
        f.write(header)
        f.write(struct.pack("<I", len(arrays)))

        for name, value in arrays.items():
            value = np.asarray(value)
            dtype = "int32" if np.issubdtype(value.dtype, np.integer) else "float32"
            name = name.encode()
            f.write(struct.pack("<H", len(name)))
            f.write(name)
            f.write(dtype_to_code[dtype])
            f.write(struct.pack(f"<B{value.ndim}I", value.ndim, *value.shape))
            f.write(value.astype(f"<{dtype[0]}4").tobytes())


def read_model(filename):
    """
    Read a classifier from a model file.

    Parameters
    ----------
    filename : str, pathlike or buffer
        Input file name or binary buffer.

    Returns
    -------
    BaseClassifier
        Classifier with the same scores as the one written.

    """
    with open_file(filename, "rb") as f:
        data = f.read()

    try:
        return _read_buffer(data)

    except (struct.error, ValueError, KeyError, UnicodeDecodeError) as e:
        raise ModelFormatError(f"Corrupted model file: {e}.")


def _read_buffer(data):
    """Parse model file content."""
    if data[:4] != MAGIC:
        raise ModelFormatError("Not a model file.")

    version, size = struct.unpack_from("<HI", data, 4)
    if version != VERSION:
        raise ModelFormatError(f"Unsupported model file version {version}.")

    i = 10
    header = json.loads(data[i : i + size].decode())
    i += size
    kind = header["kind"]
    if kind not in _model_map:
        raise ModelFormatError(f"Unknown model kind '{kind}'.")

    (count,) = struct.unpack_from("<I", data, i)
    i += 4
    arrays = {}
    for _ in range(count):
        (n,) = struct.unpack_from("<H", data, i)
        name = data[i + 2 : i + 2 + n].decode()
        i += 2 + n
        dtype = code_to_dtype[data[i : i + 1]]
        (ndim,) = struct.unpack_from("<B", data, i + 1)
        shape = struct.unpack_from(f"<{ndim}I", data, i + 2)
        i += 2 + 4 * ndim
        nbytes = int(np.prod(shape, dtype=np.int64)) * 4
        if i + nbytes > len(data):
            raise ModelFormatError(f"Array '{name}' is truncated.")

        arrays[name] = np.frombuffer(data[i : i + nbytes], dtype=dtype).reshape(shape)
        i += nbytes

    if i != len(data):
        raise ModelFormatError("Trailing data after last array.")

    reader, _ = _model_map[kind]

    return reader(arrays, header["hyperparameters"], header["threshold"])


def _read_cnn(arrays, hyperparameters, threshold):
    """Build a Byte CNN from named arrays."""
    missing = set(param_names) - set(arrays)
    if missing:
        raise ModelFormatError(f"Missing parameter(s) {sorted(missing)}.")

    params = {k: arrays[k].astype(np.float64) for k in param_names}

    return ByteCnn(params, hyperparameters, threshold)


def _write_cnn(model):
    """Convert a Byte CNN to named arrays."""
    return {k: model.params[k] for k in param_names}


def _read_trees(arrays, hyperparameters, threshold):
    """Build a tree ensemble from named arrays."""
    trees = []
    while f"tree{len(trees)}.feature" in arrays:
        prefix = f"tree{len(trees)}"
        fields = [arrays[f"{prefix}.{k}"] for k in tree_fields]
        fields = [
            x.astype(np.float64) if k in {"threshold", "value"} else x.astype(np.int64)
            for k, x in zip(tree_fields, fields)
        ]
        trees.append(RegressionTree(*fields))

    if not trees:
        raise ModelFormatError("Model file holds no tree.")

    return TreeEnsemble(trees, hyperparameters, threshold)


def _write_trees(model):
    """Convert a tree ensemble to named arrays."""
    out = {}
    for i, tree in enumerate(model.trees):
        for k, x in zip(tree_fields, tree):
            out[f"tree{i}.{k}"] = x

    return out


register("byte-cnn", _read_cnn, _write_cnn)
register("trees", _read_trees, _write_trees)
