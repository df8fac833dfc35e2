from abc import ABC, abstractmethod, abstractproperty

__all__ = [
    "BaseClassifier",
]


class BaseClassifier(ABC):
    _kind = None
    _name = ""
    _differentiable = False

    def __init__(self, threshold=0.5):
        """
        Base class for target classifiers.

        Do not use.

        """
        self.threshold = threshold

    def __repr__(self):
        """Display classifier informations."""
        out = [f"{self._name} classifier (threshold = {self.threshold}):"]
        out += [f"    {k} = {v}" for k, v in self.hyperparameters.items()]
        return "\n".join(out)

    def __call__(self, data):
        """Return maliciousness score of a program."""
        return self.score(data)

    @abstractmethod
    def score(self, data):
        raise NotImplementedError()

    def detected(self, data):
        """Return `True` if a program is flagged as malicious."""
        return self.score(data) >= self.threshold

    def predict(self, data):
        """Return predicted label ('benign' or 'malicious') of a program."""
        return "malicious" if self.detected(data) else "benign"

    @property
    def kind(self):
        """Return model container kind."""
        return self._kind

    @property
    def name(self):
        """Return classifier name."""
        return self._name

    @property
    def differentiable(self):
        """Return `True` if gradients w.r.t. byte embeddings are available."""
        return self._differentiable

    @property
    def threshold(self):
        """Return decision threshold."""
        return self._threshold

    @threshold.setter
    def threshold(self, value):
        if not 0.0 < value < 1.0:
            raise ValueError(f"Threshold must be in (0, 1), got {value}.")
        self._threshold = float(value)

    @abstractproperty
    def hyperparameters(self):
        raise NotImplementedError()
