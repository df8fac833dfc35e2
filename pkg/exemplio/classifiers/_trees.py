import collections
import logging

import numpy as np
from sklearn.tree import DecisionTreeRegressor

from .._exceptions import DimensionMismatch
from ._base import BaseClassifier
from ._features import extract_features, feature_names
from ._helpers import sigmoid, to_float32, unpack_dataset

__all__ = [
    "RegressionTree",
    "TreeEnsemble",
    "tree_score",
    "train_trees",
]


default_hyperparameters = {
    "n_estimators": 50,
    "learning_rate": 0.3,
    "max_depth": 3,
    "min_samples_leaf": 2,
    "subsample": 1.0,
}

tree_fields = ("feature", "threshold", "left", "right", "value")


class RegressionTree(collections.namedtuple("RegressionTree", tree_fields)):
    """
    Binary regression tree stored as flat node arrays.

    Node 0 is the root. Internal nodes send x[feature] <= threshold to the left
    child. Leaves have feature, left and right equal to -1.

    """

    __slots__ = ()

    def predict(self, X):
        """Return the leaf value reached by each row of X."""
        X = np.atleast_2d(X)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            feature = self.feature[node]
            internal = feature >= 0
            if not internal.any():
                break

            go_left = X[rows, np.maximum(feature, 0)] <= self.threshold[node]
            child = np.where(go_left, self.left[node], self.right[node])
            node = np.where(internal, child, node)

        return self.value[node]

    @property
    def depth(self):
        """Return tree depth."""

        def _depth(i):
            if self.feature[i] < 0:
                return 0
            return 1 + max(_depth(self.left[i]), _depth(self.right[i]))

        return _depth(0)


def constant_tree(value):
    """Return a single-leaf tree."""
    return RegressionTree(
        np.array([-1]),
        np.array([0.0]),
        np.array([-1]),
        np.array([-1]),
        to_float32([value]),
    )


class TreeEnsemble(BaseClassifier):
    _kind = "trees"
    _name = "Gradient boosted trees"

    def __init__(self, trees, hyperparameters=None, threshold=0.5):
        """
        Gradient boosted regression trees over static features.

        The first tree is a constant leaf holding the prior log-odds of the
        training labels. The score is the logistic function of the sum of all
        tree outputs.

        Parameters
        ----------
        trees : list of RegressionTree
            Fitted trees.
        hyperparameters : dict or None, optional, default None
            Training hyperparameters.
        threshold : scalar, optional, default 0.5
            Decision threshold.

        """
        super().__init__(threshold)
        hp = dict(default_hyperparameters)
        hp.update(hyperparameters if hyperparameters is not None else {})
        self._hyperparameters = hp
        self._trees = list(trees)
        self.training_accuracy = None

        n_features = len(feature_names())
        for tree in self._trees:
            if tree.feature.max() >= n_features:
                raise DimensionMismatch("Tree references an unknown feature.")

    def score(self, data):
        """Return maliciousness score of a program."""
        return tree_score(self, data)

    def decision_function(self, X):
        """Return raw sums of tree outputs for feature rows X."""
        X = np.atleast_2d(X)

        return sum(tree.predict(X) for tree in self._trees)

    def score_features(self, X):
        """Return scores for feature rows X."""
        return sigmoid(self.decision_function(X))

    @property
    def trees(self):
        """Return fitted trees."""
        return self._trees

    @property
    def hyperparameters(self):
        """Return training hyperparameters."""
        return self._hyperparameters


def tree_score(model, data):
    """
    Compute maliciousness score of a program.

    Parameters
    ----------
    model : TreeEnsemble
        Tree ensemble classifier.
    data : bytes
        Program content. Must be a valid program.

    Returns
    -------
    scalar
        Score in [0, 1].

    """
    return float(model.score_features(extract_features(data))[0])


def fit_tree(X, residuals, learning_rate, max_depth, min_samples_leaf, seed=0):
    """Fit a least squares regression tree to residuals."""
    regressor = DecisionTreeRegressor(
        max_depth=max_depth, min_samples_leaf=min_samples_leaf, random_state=seed
    )
    regressor.fit(X, residuals)

    # Leaves are flagged by -1 in every index array
    t = regressor.tree_
    leaf = t.children_left == t.children_right

    return RegressionTree(
        np.where(leaf, -1, t.feature).astype(np.int64),
        to_float32(np.where(leaf, 0.0, t.threshold)),
        t.children_left.astype(np.int64),
        t.children_right.astype(np.int64),
        to_float32(learning_rate * t.value[:, 0, 0]),
    )


def train_trees(dataset, hyperparameters=None, seed=0):
    """
    Train gradient boosted trees with logistic loss.

    Parameters
    ----------
    dataset : list
        RawExe or (program, label) pairs. Both classes must be present.
    hyperparameters : dict or None, optional, default None
        Training hyperparameters:

         - 'n_estimators': number of boosting rounds (default 50)
         - 'learning_rate': shrinkage applied to leaf values (default 0.3)
         - 'max_depth': maximum tree depth (default 3)
         - 'min_samples_leaf': minimum number of samples per leaf (default 2)
         - 'subsample': fraction of samples drawn for each round (default 1.0)

    seed : int, optional, default 0
        Seed for row subsampling and tree fitting.

    Returns
    -------
    TreeEnsemble
        Trained classifier. Thresholds and leaf values are rounded to single
        precision.

    """
    hp = dict(default_hyperparameters)
    hyperparameters = hyperparameters if hyperparameters is not None else {}
    unknown = set(hyperparameters) - set(hp)
    if unknown:
        raise ValueError(f"Unknown hyperparameters {sorted(unknown)}.")
    hp.update(hyperparameters)
    if not 0.0 < hp["subsample"] <= 1.0:
        raise ValueError("Subsample must be in (0, 1].")

    data, labels = unpack_dataset(dataset)
    X = np.array([extract_features(x) for x in data])
    y = labels.astype(np.float64)

    prior = np.clip(y.mean(), 1.0e-6, 1.0 - 1.0e-6)
    trees = [constant_tree(np.log(prior / (1.0 - prior)))]
    logits = np.full(len(y), trees[0].value[0])

    rng = np.random.default_rng(seed)
    n_rows = max(int(round(hp["subsample"] * len(y))), 1)
    for i in range(hp["n_estimators"]):
        residuals = y - sigmoid(logits)
        idx = (
            np.sort(rng.choice(len(y), n_rows, replace=False))
            if n_rows < len(y)
            else np.arange(len(y))
        )
        tree = fit_tree(
            X[idx],
            residuals[idx],
            hp["learning_rate"],
            hp["max_depth"],
            hp["min_samples_leaf"],
            seed + i,
        )
        trees.append(tree)
        logits += tree.predict(X)

        logging.info(f"Round {i + 1}: {len(tree.feature)} nodes")

    model = TreeEnsemble(trees, hp)
    scores = model.score_features(X)
    model.training_accuracy = float(np.mean((scores >= model.threshold) == labels))

    return model
