from ._base import BaseClassifier
from ._byte_cnn import (
    ByteCnn,
    EmbeddingGradient,
    cnn_grad,
    cnn_score,
    init_cnn,
    train_cnn,
)
from ._features import byte_histogram, extract_features, feature_names
from ._helpers import evaluate
from ._io import read_model, register, write_model
from ._trees import RegressionTree, TreeEnsemble, train_trees, tree_score

__all__ = [
    "BaseClassifier",
    "ByteCnn",
    "TreeEnsemble",
    "RegressionTree",
    "EmbeddingGradient",
    "cnn_score",
    "cnn_grad",
    "init_cnn",
    "train_cnn",
    "tree_score",
    "train_trees",
    "extract_features",
    "feature_names",
    "byte_histogram",
    "evaluate",
    "register",
    "read_model",
    "write_model",
]
