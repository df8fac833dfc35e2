import numpy as np

from .._exceptions import DegenerateDataset
from .._pe import RawExe

__all__ = [
    "evaluate",
]


label_to_int = {"benign": 0, "malicious": 1, 0: 0, 1: 1}


def unpack_dataset(dataset):
    """
    Split a dataset into program bytes and binary labels.

    Items are either :class:`RawExe` or (program, label) pairs where program
    is a RawExe or bytes, and label is 'benign'/'malicious' or 0/1.

    """
    data, labels = [], []
    for item in dataset:
        if isinstance(item, RawExe):
            sample, label = item.bytes, item.label
        else:
            sample, label = item
            sample = sample.bytes if isinstance(sample, RawExe) else sample

        if label not in label_to_int:
            raise ValueError(f"Unknown label '{label}'.")

        data.append(bytes(sample))
        labels.append(label_to_int[label])

    labels = np.array(labels, dtype=np.int64)
    if len(np.unique(labels)) < 2:
        raise DegenerateDataset(
            "Dataset must contain both benign and malicious samples."
        )

    return data, labels


def evaluate(model, dataset):
    """
    Compute accuracy of a classifier.

    Parameters
    ----------
    model : BaseClassifier
        Classifier to evaluate.
    dataset : list
        RawExe or (program, label) pairs.

    Returns
    -------
    scalar
        Fraction of correctly classified programs.

    """
    data, labels = unpack_dataset(dataset)
    predictions = np.array([model.detected(x) for x in data], dtype=np.int64)

    return float(np.mean(predictions == labels))


def sigmoid(x):
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    positive = x >= 0.0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    ex = np.exp(x[~positive])
    out[~positive] = ex / (1.0 + ex)

    return out if out.ndim else float(out)


def to_float32(x):
    """Round to the nearest single precision values, kept as float64."""
    return np.asarray(x, dtype=np.float32).astype(np.float64)
