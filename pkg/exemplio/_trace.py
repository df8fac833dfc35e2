import collections

__all__ = [
    "TraceStep",
    "AttackTrace",
]


TraceStep = collections.namedtuple(
    "TraceStep", ["effort", "score", "detected", "injected", "fitness"]
)


class AttackTrace(
    collections.namedtuple(
        "AttackTrace",
        ["steps", "final_bytes", "succeeded", "initial_score", "excluded"],
    )
):
    """
    Record of an attack run.

    Steps are ordered by strictly increasing effort (iterations for the
    white-box engine, classifier queries for the black-box engines).

    """

    __slots__ = ()

    def at(self, effort):
        """Return the last step with effort lower than or equal to `effort`."""
        out = None
        for step in self.steps:
            if step.effort > effort:
                break
            out = step

        return out

    @property
    def efforts(self):
        """Return efforts of all steps."""
        return [step.effort for step in self.steps]

    @property
    def scores(self):
        """Return scores of all steps."""
        return [step.score for step in self.steps]

    @property
    def final_score(self):
        """Return score of the last step, or the initial score if no step."""
        return self.steps[-1].score if self.steps else self.initial_score

    def to_dict(self, with_bytes=False):
        """Convert to a JSON serializable dict."""
        out = {
            "steps": [list(step) for step in self.steps],
            "succeeded": self.succeeded,
            "initial_score": self.initial_score,
            "excluded": self.excluded,
        }
        if with_bytes:
            out["final_bytes"] = self.final_bytes.hex()

        return out

    @classmethod
    def from_dict(cls, data):
        """Build from a dict written by :meth:`to_dict`."""
        return cls(
            [TraceStep(*step) for step in data["steps"]],
            bytes.fromhex(data["final_bytes"]) if "final_bytes" in data else b"",
            bool(data["succeeded"]),
            data["initial_score"],
            int(data["excluded"]),
        )
