import collections
import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .._exceptions import DimensionMismatch, PositionOutOfRange
from ._base import BaseClassifier
from ._helpers import sigmoid, to_float32, unpack_dataset

__all__ = [
    "ByteCnn",
    "EmbeddingGradient",
    "cnn_score",
    "cnn_grad",
    "init_cnn",
    "train_cnn",
]


PADDING_TOKEN = 256
NUM_TOKENS = 257

default_hyperparameters = {
    "max_length": 4096,
    "embedding_dim": 8,
    "filters": 64,
    "window": 32,
    "stride": 32,
}

default_training = {
    "epochs": 20,
    "batch_size": 16,
    "learning_rate": 0.005,
    "beta1": 0.9,
    "beta2": 0.999,
    "epsilon": 1.0e-8,
}

param_names = (
    "embedding",
    "conv_a",
    "bias_a",
    "conv_b",
    "bias_b",
    "dense",
    "dense_bias",
)


EmbeddingGradient = collections.namedtuple(
    "EmbeddingGradient", ["positions", "gradients"]
)


class ByteCnn(BaseClassifier):
    _kind = "byte-cnn"
    _name = "Byte CNN"
    _differentiable = True

    def __init__(self, params, hyperparameters=None, threshold=0.5):
        """
        Gated convolutional classifier over raw bytes.

        Each byte (and an extra padding token) is mapped to an embedding vector.
        Two convolutions with the same window and stride are combined through a
        sigmoid gate, max-pooled over time, and fed to a logistic output unit.

        Parameters
        ----------
        params : dict
            Model parameters:

             - 'embedding': embedding table, shape (257, d)
             - 'conv_a', 'conv_b': convolution kernels, shape (d, w, c)
             - 'bias_a', 'bias_b': convolution biases, shape (c,)
             - 'dense': output weights, shape (c,)
             - 'dense_bias': output bias, shape (1,)

        hyperparameters : dict or None, optional, default None
            Architecture hyperparameters ('max_length', 'embedding_dim',
            'filters', 'window', 'stride').
        threshold : scalar, optional, default 0.5
            Decision threshold.

        """
        super().__init__(threshold)
        hp = dict(default_hyperparameters)
        hp.update(hyperparameters if hyperparameters is not None else {})
        self._hyperparameters = hp
        self._params = {k: np.asarray(params[k], dtype=np.float64) for k in param_names}
        self._check()
        self.training_accuracy = None

    def _check(self):
        hp, p = self._hyperparameters, self._params
        n, d, c, w = hp["max_length"], hp["embedding_dim"], hp["filters"], hp["window"]
        if w > n or hp["stride"] < 1:
            raise ValueError("Invalid window or stride.")

        shapes = {
            "embedding": (NUM_TOKENS, d),
            "conv_a": (d, w, c),
            "bias_a": (c,),
            "conv_b": (d, w, c),
            "bias_b": (c,),
            "dense": (c,),
            "dense_bias": (1,),
        }
        for k, shape in shapes.items():
            if p[k].shape != shape:
                raise DimensionMismatch(
                    f"Parameter '{k}' has shape {p[k].shape}, expected {shape}."
                )

    def score(self, data):
        """Return maliciousness score of a program."""
        return cnn_score(self, data)

    def embedding_gradient(self, data, positions):
        """Return gradient of the score w.r.t. embeddings at positions."""
        return cnn_grad(self, data, positions)

    def score_and_gradient(self, data, positions):
        """Return score and embedding gradients with a single forward pass."""
        idx = encode(data, self.max_length)
        positions = _check_positions(positions, self.max_length)
        cache = _forward(self._params, self._hyperparameters, idx)
        s = sigmoid(cache["logit"])
        grads = _backward(self._params, self._hyperparameters, cache, s * (1.0 - s))

        return s, EmbeddingGradient(positions, grads["inputs"][positions])

    def score_and_direction(self, data, positions):
        """
        Return score and a descent direction that reaches every window holding
        one of the positions.

        The exact gradient of a max-pooled network is zero outside the arg-max
        windows. Here, on top of the exact gradient, each window covering a
        position is assigned a filter with a negative output weight (most
        negative first, round-robin over windows in file order) and receives the
        gradient of that filter's activation as if it were the pooled one.
        Following the direction raises benign evidence in windows that do not
        currently drive the score.

        Parameters
        ----------
        data : bytes
            Program content.
        positions : array_like
            Byte offsets, all lower than `max_length`.

        Returns
        -------
        scalar
            Score in [0, 1].
        EmbeddingGradient
            namedtuple (positions, gradients) with gradients of shape
            (len(positions), d).

        """
        idx = encode(data, self.max_length)
        positions = _check_positions(positions, self.max_length)
        cache = _forward(self._params, self._hyperparameters, idx)
        s = sigmoid(cache["logit"])
        dx = _spread_backward(
            self._params, self._hyperparameters, cache, s * (1.0 - s), positions
        )

        return s, EmbeddingGradient(positions, dx[positions])

    def embed(self, data, positions):
        """Return embedding vectors of bytes at positions."""
        idx = encode(data, self.max_length)
        positions = _check_positions(positions, self.max_length)

        return self.embedding_table[idx[positions]]

    @property
    def params(self):
        """Return model parameters."""
        return self._params

    @property
    def hyperparameters(self):
        """Return architecture hyperparameters."""
        return self._hyperparameters

    @property
    def embedding_table(self):
        """Return embedding table."""
        return self._params["embedding"]

    @property
    def max_length(self):
        """Return number of bytes seen by the model."""
        return self._hyperparameters["max_length"]


def encode(data, n):
    """Convert the first n bytes of a program to token indices, padding with 256."""
    idx = np.full(n, PADDING_TOKEN, dtype=np.int64)
    b = np.frombuffer(bytes(data[:n]), dtype=np.uint8)
    idx[: len(b)] = b

    return idx


def _check_positions(positions, n):
    positions = np.asarray(positions, dtype=np.int64).ravel()
    if positions.size and (positions.min() < 0 or positions.max() >= n):
        raise PositionOutOfRange(
            f"Positions must be in [0, {n}), "
            f"got [{positions.min()}, {positions.max()}]."
        )

    return positions


def _forward(params, hp, idx):
    """Forward pass, keeping intermediate arrays for backpropagation."""
    d, c, w, stride = hp["embedding_dim"], hp["filters"], hp["window"], hp["stride"]

    x = params["embedding"][idx]
    windows = sliding_window_view(x, w, axis=0)[::stride]  # (T, d, w)
    flat = windows.reshape(len(windows), d * w)

    za = flat @ params["conv_a"].reshape(d * w, c) + params["bias_a"]
    zb = flat @ params["conv_b"].reshape(d * w, c) + params["bias_b"]
    gate = sigmoid(zb)
    g = za * gate

    # Ties resolve to the lowest window index
    argmax = np.argmax(g, axis=0)
    filters = np.arange(c)
    pooled = g[argmax, filters]
    logit = float(pooled @ params["dense"] + params["dense_bias"][0])

    return {
        "idx": idx,
        "windows": windows,
        "za": za[argmax, filters],
        "gate": gate[argmax, filters],
        "za_windows": za,
        "gate_windows": gate,
        "argmax": argmax,
        "pooled": pooled,
        "logit": logit,
    }


def _backward(params, hp, cache, upstream):
    """Backpropagate a derivative w.r.t. the logit."""
    n, d, w, stride = hp["max_length"], hp["embedding_dim"], hp["window"], hp["stride"]

    dpooled = upstream * params["dense"]
    za, gate = cache["za"], cache["gate"]
    dza = dpooled * gate
    dzb = dpooled * za * gate * (1.0 - gate)

    # Only the arg-max window of each filter receives gradient
    selected = cache["windows"][cache["argmax"]]  # (c, d, w)
    contrib = np.einsum("iwk,k->kwi", params["conv_a"], dza)
    contrib += np.einsum("iwk,k->kwi", params["conv_b"], dzb)
    rows = cache["argmax"][:, None] * stride + np.arange(w)
    dx = np.zeros((n, d))
    np.add.at(dx, rows.ravel(), contrib.reshape(-1, d))

    dembedding = np.zeros((NUM_TOKENS, d))
    np.add.at(dembedding, cache["idx"], dx)

    return {
        "inputs": dx,
        "embedding": dembedding,
        "conv_a": np.einsum("kiw,k->iwk", selected, dza),
        "bias_a": dza,
        "conv_b": np.einsum("kiw,k->iwk", selected, dzb),
        "bias_b": dzb,
        "dense": upstream * cache["pooled"],
        "dense_bias": np.array([upstream]),
    }


def _spread_backward(params, hp, cache, upstream, positions):
    """Backpropagate through every window covering a position."""
    n, d, w, stride = hp["max_length"], hp["embedding_dim"], hp["window"], hp["stride"]
    za, gate = cache["za_windows"], cache["gate_windows"]
    dense = params["dense"]
    num_windows, c = za.shape

    # Exact subgradient at the arg-max windows
    coef = np.zeros((num_windows, c))
    coef[cache["argmax"], np.arange(c)] = dense

    covered = np.zeros(n, dtype=bool)
    covered[positions] = True
    editable = np.flatnonzero(
        sliding_window_view(covered, w)[::stride][:num_windows].any(axis=1)
    )
    benign = np.argsort(dense, kind="stable")
    benign = benign[dense[benign] < 0.0]
    if benign.size:
        assigned = benign[np.arange(editable.size) % benign.size]
        keep = cache["argmax"][assigned] != editable
        coef[editable[keep], assigned[keep]] += dense[assigned[keep]]

    dza = upstream * coef * gate
    dzb = upstream * coef * za * gate * (1.0 - gate)
    contrib = np.einsum("iwk,tk->twi", params["conv_a"], dza)
    contrib += np.einsum("iwk,tk->twi", params["conv_b"], dzb)
    rows = np.arange(num_windows)[:, None] * stride + np.arange(w)
    dx = np.zeros((n, d))
    np.add.at(dx, rows.ravel(), contrib.reshape(-1, d))

    return dx


def cnn_score(model, data):
    """
    Compute maliciousness score of a program.

    Parameters
    ----------
    model : ByteCnn
        Byte CNN classifier.
    data : bytes
        Program content. Only the first `max_length` bytes are seen.

    Returns
    -------
    scalar
        Score in [0, 1].

    """
    idx = encode(data, model.max_length)
    cache = _forward(model.params, model.hyperparameters, idx)

    return sigmoid(cache["logit"])


def cnn_grad(model, data, positions):
    """
    Compute gradient of the score w.r.t. the embedding at each position.

    Parameters
    ----------
    model : ByteCnn
        Byte CNN classifier.
    data : bytes
        Program content.
    positions : array_like
        Byte offsets, all lower than `max_length`.

    Returns
    -------
    EmbeddingGradient
        namedtuple (positions, gradients) with gradients of shape (len(positions), d).
        Rows of positions outside every arg-max receptive field are zero.

    """
    return model.score_and_gradient(data, positions)[1]


def init_cnn(hyperparameters=None, seed=0):
    """Return a randomly initialized Byte CNN."""
    hp = dict(default_hyperparameters)
    hp.update(hyperparameters if hyperparameters is not None else {})
    d, c, w = hp["embedding_dim"], hp["filters"], hp["window"]
    rng = np.random.default_rng(seed)

    embedding = rng.normal(0.0, 1.0, (NUM_TOKENS, d))
    embedding[PADDING_TOKEN] = 0.0
    scale = 1.0 / np.sqrt(d * w)
    params = {
        "embedding": embedding,
        "conv_a": rng.normal(0.0, scale, (d, w, c)),
        "bias_a": np.zeros(c),
        "conv_b": rng.normal(0.0, scale, (d, w, c)),
        "bias_b": np.zeros(c),
        "dense": rng.normal(0.0, 1.0 / np.sqrt(c), c),
        "dense_bias": np.zeros(1),
    }

    return ByteCnn(params, {k: hp[k] for k in default_hyperparameters})


def train_cnn(dataset, hyperparameters=None, seed=0):
    """
    Train a Byte CNN with binary cross-entropy and Adam.

    Parameters
    ----------
    dataset : list
        RawExe or (program, label) pairs. Both classes must be present.
    hyperparameters : dict or None, optional, default None
        Architecture and training hyperparameters ('epochs', 'batch_size',
        'learning_rate', 'beta1', 'beta2', 'epsilon').
    seed : int, optional, default 0
        Seed for initialization and shuffling. Same seed and dataset yield
        bit-identical parameters.

    Returns
    -------
    ByteCnn
        Trained classifier. Parameters are rounded to single precision.

    """
    hyperparameters = hyperparameters if hyperparameters is not None else {}
    allowed = set(default_hyperparameters) | set(default_training)
    unknown = set(hyperparameters) - allowed
    if unknown:
        raise ValueError(f"Unknown hyperparameters {sorted(unknown)}.")

    data, labels = unpack_dataset(dataset)
    opts = dict(default_training)
    opts.update({k: v for k, v in hyperparameters.items() if k in default_training})
    model = init_cnn(
        {k: v for k, v in hyperparameters.items() if k in default_hyperparameters},
        seed,
    )
    hp = model.hyperparameters
    params = model.params
    tokens = [encode(x, hp["max_length"]) for x in data]

    rng = np.random.default_rng(seed + 1)
    lr, beta1, beta2, eps = (
        opts["learning_rate"],
        opts["beta1"],
        opts["beta2"],
        opts["epsilon"],
    )
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(v) for k, v in params.items()}
    step = 0
    for epoch in range(opts["epochs"]):
        order = rng.permutation(len(tokens))
        loss = 0.0
        for start in range(0, len(order), opts["batch_size"]):
            batch = order[start : start + opts["batch_size"]]
            grads = {k: np.zeros_like(v) for k, v in params.items()}
            for i in batch:
                cache = _forward(params, hp, tokens[i])
                s = sigmoid(cache["logit"])
                loss -= np.log(max(s if labels[i] else 1.0 - s, 1.0e-12))
                g = _backward(params, hp, cache, s - labels[i])
                for k in grads:
                    grads[k] += g[k]

            # Padding token embedding stays fixed
            grads["embedding"][PADDING_TOKEN] = 0.0

            step += 1
            for k in params:
                gk = grads[k] / len(batch)
                m[k] = beta1 * m[k] + (1.0 - beta1) * gk
                v[k] = beta2 * v[k] + (1.0 - beta2) * gk ** 2
                mhat = m[k] / (1.0 - beta1 ** step)
                vhat = v[k] / (1.0 - beta2 ** step)
                params[k] -= lr * mhat / (np.sqrt(vhat) + eps)

        logging.info(f"Epoch {epoch + 1}: loss = {loss / len(tokens):.4f}")

    out = ByteCnn({k: to_float32(x) for k, x in params.items()}, hp)
    hits = [out.detected(x) == bool(y) for x, y in zip(data, labels)]
    out.training_accuracy = float(np.mean(hits))

    return out
