import helpers
import numpy as np
import pytest

import exemplio
from exemplio._exceptions import (
    ConfigError,
    DimensionMismatch,
    NoEditableBytesInWindow,
    NotDifferentiable,
)
from exemplio.classifiers import ByteCnn
from exemplio.whitebox import (
    WhiteboxConfig,
    reconstruct_byte,
    reconstruct_bytes,
    run_whitebox,
)
from exemplio.whitebox._attack import embedding_scale, unit_rows

sample = helpers.make_sample("malicious", seed=2)


def test_reconstruct_linear_table():
    table = np.append(np.arange(256) / 255.0, 0.0)[:, None]

    assert reconstruct_byte(table[0], [-1.0], table, 1.0) == 255
    assert reconstruct_byte(table[200], [1.0], table, 1.0) == 0


def test_reconstruct_zero_gradient():
    table = np.random.default_rng(0).normal(size=(257, 4))
    values = np.array([5, 77, 200, 255, 0])
    out = reconstruct_bytes(table[values], np.zeros((5, 4)), table)

    assert out.dtype == np.uint8
    assert np.array_equal(out, values)


def test_reconstruct_brute_force():
    rng = np.random.default_rng(1)
    table = rng.normal(size=(257, 3))
    embeddings = table[rng.integers(0, 256, 10000)]
    gradients = rng.normal(size=(10000, 3))
    out = reconstruct_bytes(embeddings, gradients, table, 0.5)

    targets = embeddings - 0.5 * gradients
    distances = ((table[None, :256] - targets[:, None]) ** 2).sum(axis=2)
    assert np.array_equal(out, np.argmin(distances, axis=1))

    for x, g, b in zip(embeddings[:20], gradients[:20], out[:20]):
        assert reconstruct_byte(x, g, table, 0.5) == b


def test_reconstruct_errors():
    table = np.zeros((257, 4))

    with pytest.raises(DimensionMismatch):
        reconstruct_bytes(np.zeros((2, 4)), np.zeros((3, 4)), table)

    with pytest.raises(DimensionMismatch):
        reconstruct_bytes(np.zeros((2, 3)), np.zeros((2, 3)), table)

    with pytest.raises(DimensionMismatch):
        reconstruct_bytes(np.zeros((2, 4)), np.zeros((2, 4)), table[:10])


def test_run_whitebox():
    model = helpers.tiny_cnn(seed=1)
    trace = run_whitebox(sample, "partial_dos", model, WhiteboxConfig(5))

    assert trace.efforts == [1, 2, 3, 4, 5]
    assert trace.initial_score == model.score(sample.bytes)
    assert trace.final_score == model.score(trace.final_bytes)
    assert trace.succeeded == (trace.final_score < model.threshold)
    assert trace.excluded == 0
    assert all(step.injected == 0 for step in trace.steps)
    assert exemplio.validate(trace.final_bytes).ok
    assert trace.final_bytes[:2] == sample.bytes[:2]
    assert trace.final_bytes[60:] == sample.bytes[60:]

    # Deterministic
    assert run_whitebox(sample, "partial_dos", model, WhiteboxConfig(5)) == trace


def test_unit_rows():
    g = np.array([[3.0, 4.0], [0.0, 0.0], [1.0e-12, 0.0]])

    assert np.allclose(unit_rows(g), [[0.6, 0.8], [0.0, 0.0], [1.0, 0.0]])


def test_run_whitebox_one_iteration():
    model = helpers.tiny_cnn()
    cfg = WhiteboxConfig(max_iterations=1)
    trace = run_whitebox(sample.bytes, ("extend", {"amount": 512}), model, cfg)

    assert len(trace.steps) == 1
    assert trace.steps[0].injected == 512
    assert len(trace.final_bytes) == len(sample.bytes) + 512


def test_run_whitebox_excluded():
    model = helpers.tiny_cnn()
    trace = run_whitebox(sample, "slack_fill", model, WhiteboxConfig(2))

    # Slack of the second and third sections lies beyond the model window
    assert trace.excluded == 2 * 424
    assert trace.final_bytes[2048:] == sample.bytes[2048:]


def test_run_whitebox_stop_below_threshold():
    model = helpers.tiny_cnn()
    params = dict(model.params)
    params["dense"] = np.zeros_like(params["dense"])
    model = ByteCnn(params, model.hyperparameters, threshold=0.9)
    cfg = WhiteboxConfig(max_iterations=10, stop_below_threshold=True)
    trace = run_whitebox(sample, "full_dos", model, cfg)

    assert len(trace.steps) == 1
    assert trace.succeeded

    # Zero gradient keeps current bytes
    assert trace.final_bytes == sample.bytes


def test_run_whitebox_random_init():
    model = helpers.tiny_cnn()
    cfg = WhiteboxConfig(max_iterations=2, random_init=True, seed=7)
    trace1 = run_whitebox(sample, "partial_dos", model, cfg)
    trace2 = run_whitebox(sample, "partial_dos", model, cfg)

    assert trace1.final_bytes == trace2.final_bytes


def test_run_whitebox_errors():
    model = helpers.tiny_cnn()

    with pytest.raises(NoEditableBytesInWindow):
        run_whitebox(sample, ("padding", {"n": 100}), model)

    trees = exemplio.classifiers.train_trees(
        helpers.make_dataset(2), {"n_estimators": 1}
    )
    with pytest.raises(NotDifferentiable):
        run_whitebox(sample, "partial_dos", trees)


def test_whitebox_config():
    cfg = WhiteboxConfig.from_dict({"max_iterations": 3, "step_size": 0.5})
    assert cfg.max_iterations == 3
    assert cfg.step_size == 0.5
    assert not cfg.stop_below_threshold

    with pytest.raises(ConfigError):
        WhiteboxConfig.from_dict({"iterations": 3})

    with pytest.raises(ConfigError):
        WhiteboxConfig.from_dict({"max_iterations": 0})

    with pytest.raises(ValueError):
        WhiteboxConfig(step_size=0.0)


def test_embedding_scale():
    table = np.zeros((257, 2))
    table[:128, 0] = 1.0
    table[256] = 100.0

    # Half of the byte pairs are one unit apart
    assert np.isclose(embedding_scale(table), np.sqrt(0.5))


@pytest.mark.parametrize("direction", ["spread", "exact"])
def test_run_whitebox_gap_bytes(direction):
    model = helpers.tiny_cnn()
    params = dict(model.params)
    params["dense"] = -np.abs(params["dense"])
    model = ByteCnn(params, model.hyperparameters)

    cfg = WhiteboxConfig(max_iterations=3, direction=direction)
    trace = run_whitebox(sample, ("extend", {"amount": 512}), model, cfg)
    start = helpers.optional_header_offset(sample.bytes) - 24
    gap = np.frombuffer(trace.final_bytes[start : start + 512], dtype=np.uint8)
    windows = gap.reshape(-1, 16).any(axis=1)

    # 32 gap windows, 8 filters with one arg-max window each per iteration
    if direction == "spread":
        assert windows.all()
    else:
        assert windows.sum() <= 3 * 8


def test_whitebox_config_direction():
    assert WhiteboxConfig().direction == "spread"

    with pytest.raises(ConfigError):
        WhiteboxConfig.from_dict({"direction": "sideways"})
