import threading

from .._exceptions import QueryBudgetExceeded

__all__ = [
    "QueryCounter",
]


class QueryCounter:
    def __init__(self, model, limit=None):
        """
        Classifier wrapper counting score queries.

        Parameters
        ----------
        model : BaseClassifier
            Wrapped classifier.
        limit : int or None, optional, default None
            Maximum number of queries. Any query beyond raises.

        """
        self._model = model
        self._limit = limit
        self._count = 0
        self._lock = threading.Lock()

    def __repr__(self):
        """Display wrapped classifier and query count."""
        return f"{self._model!r}\n    queries = {self._count}"

    def __getattr__(self, name):
        """Delegate other attributes to the wrapped classifier."""
        if name.startswith("_"):
            raise AttributeError(name)

        return getattr(self._model, name)

    def score(self, data):
        """Return maliciousness score of a program and count the query."""
        with self._lock:
            if self._limit is not None and self._count >= self._limit:
                raise QueryBudgetExceeded(f"Query budget of {self._limit} exhausted.")
            self._count += 1

        return self._model.score(data)

    def reset(self):
        """Reset query count."""
        with self._lock:
            self._count = 0

    @property
    def count(self):
        """Return number of queries performed so far."""
        return self._count

    @property
    def limit(self):
        """Return maximum number of queries."""
        return self._limit

    @property
    def model(self):
        """Return wrapped classifier."""
        return self._model
