import numpy as np

from .._exceptions import DimensionMismatch

__all__ = [
    "reconstruct_byte",
    "reconstruct_bytes",
]


CHUNK_SIZE = 256


def reconstruct_bytes(embeddings, gradients, table, step_size=1.0):
    """
    Map gradient steps in embedding space back to byte values.

    For each position, the target point is `embedding - step_size * gradient`
    and the returned byte is the one whose embedding is nearest the target
    in squared Euclidean distance.

    Parameters
    ----------
    embeddings : array_like
        Current embeddings, shape (m, d).
    gradients : array_like
        Score gradients w.r.t. embeddings, shape (m, d).
    table : array_like
        Embedding table, shape (257, d). The padding row is never returned.
    step_size : scalar, optional, default 1.0
        Step size in embedding space.

    Returns
    -------
    array_like
        Byte values (uint8), shape (m,). Ties resolve to the smallest value.

    """
    embeddings = np.atleast_2d(np.asarray(embeddings, dtype=np.float64))
    gradients = np.atleast_2d(np.asarray(gradients, dtype=np.float64))
    table = np.asarray(table, dtype=np.float64)

    if table.ndim != 2 or len(table) < 256:
        raise DimensionMismatch("Embedding table must have at least 256 rows.")

    d = table.shape[1]
    if embeddings.shape != gradients.shape or embeddings.shape[1] != d:
        raise DimensionMismatch(
            f"Embeddings {embeddings.shape} and gradients {gradients.shape} "
            f"do not match table dimension {d}."
        )

    targets = embeddings - step_size * gradients
    candidates = table[:256]
    out = np.empty(len(targets), dtype=np.uint8)
    for i in range(0, len(targets), CHUNK_SIZE):
        diff = candidates[None, :, :] - targets[i : i + CHUNK_SIZE, None, :]
        out[i : i + CHUNK_SIZE] = np.argmin((diff ** 2).sum(axis=2), axis=1)

    return out


def reconstruct_byte(current_embedding, gradient, table, step_size=1.0):
    """
    Reconstruct a single byte.

    Parameters
    ----------
    current_embedding : array_like
        Embedding of the current byte, shape (d,).
    gradient : array_like
        Score gradient w.r.t. the embedding, shape (d,).
    table : array_like
        Embedding table, shape (257, d).
    step_size : scalar, optional, default 1.0
        Step size in embedding space.

    Returns
    -------
    int
        Byte value in [0, 255].

    """
    current_embedding = np.asarray(current_embedding, dtype=np.float64)
    gradient = np.asarray(gradient, dtype=np.float64)
    if current_embedding.ndim != 1 or gradient.ndim != 1:
        raise DimensionMismatch("Embedding and gradient must be vectors.")

    out = reconstruct_bytes(current_embedding, gradient, table, step_size)

    return int(out[0])
