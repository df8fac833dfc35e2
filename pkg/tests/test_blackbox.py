import os

import helpers
import numpy as np
import pytest

import exemplio
from exemplio._exceptions import (
    BudgetTooSmall,
    ConfigError,
    LengthMismatch,
    NoEditableBytesInWindow,
    NoHeaderRoom,
    NoPayloadsFound,
    QueryBudgetExceeded,
)
from exemplio.blackbox import (
    GammaConfig,
    GeneticConfig,
    Genome,
    QueryCounter,
    gamma_candidate,
    gamma_fitness,
    harvest_sections,
    run_blackbox_bytes,
    run_gamma,
    run_genetic,
)
from exemplio.manipulations import SectionPayload

sample = helpers.make_sample("malicious", seed=3)


def quadratic(genes):
    return float((np.asarray(genes) ** 2).sum())


def test_genome():
    genome = Genome([-0.5, 0.3, 2.0])

    assert np.array_equal(genome.genes, [0.0, 0.3, 1.0])
    assert len(genome) == 3


def test_run_genetic():
    fitness = []
    for seed in range(10):
        best, trace = run_genetic(quadratic, 4, GeneticConfig(seed=seed))
        fitness.append(quadratic(best.genes))

        assert len(trace.steps) == 500
        assert trace.efforts == list(range(1, 501))
        assert trace.steps[-1].fitness == fitness[-1]
        assert (np.diff([step.fitness for step in trace.steps]) <= 0.0).all()

    # At least 9 seeds out of 10 reach the optimum
    assert sum(f <= 0.01 for f in fitness) >= 9


def test_run_genetic_deterministic():
    cfg = GeneticConfig(max_queries=100, seed=3)
    best1, trace1 = run_genetic(quadratic, 5, cfg)
    best2, trace2 = run_genetic(quadratic, 5, cfg)
    best3, trace3 = run_genetic(quadratic, 5, cfg._replace(jobs=3))

    assert np.array_equal(best1.genes, best2.genes)
    assert trace1 == trace2 == trace3


@pytest.mark.parametrize("max_queries", [10, 37, 500])
def test_run_genetic_budget(max_queries):
    calls = []

    def objective(genes):
        calls.append(genes)
        return quadratic(genes)

    _, trace = run_genetic(objective, 3, GeneticConfig(max_queries=max_queries))

    assert len(calls) == len(trace.steps) == max_queries


def test_run_genetic_errors():
    with pytest.raises(BudgetTooSmall):
        run_genetic(quadratic, 2, GeneticConfig(population_size=10, max_queries=5))

    with pytest.raises(ValueError):
        run_genetic(quadratic, 0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"population_size": 1},
        {"elitism_count": 0},
        {"elitism_count": 10},
        {"crossover_rate": 1.5},
        {"mutation_rate": -0.1},
        {"mutation_sigma": -1.0},
        {"jobs": 0},
    ],
)
def test_genetic_config_errors(kwargs):
    with pytest.raises(ValueError):
        GeneticConfig(**kwargs)

    with pytest.raises(ConfigError):
        GeneticConfig.from_dict(kwargs)


def test_query_counter():
    model = helpers.ZeroCounter()
    counter = QueryCounter(model)
    counter.score(b"\x00\x01")
    counter.score(b"\x00")

    assert counter.count == 2
    assert counter.threshold == model.threshold
    assert counter.model is model

    counter.reset()
    assert counter.count == 0


def test_query_counter_limit():
    counter = QueryCounter(helpers.ZeroCounter(), limit=2)
    counter.score(b"\x00")
    counter.score(b"\x00")

    assert counter.limit == 2
    with pytest.raises(QueryBudgetExceeded):
        counter.score(b"\x00")
    assert counter.count == 2


def test_run_blackbox_bytes():
    model = helpers.ZeroCounter()
    counter = QueryCounter(model)
    cfg = GeneticConfig(max_queries=60, seed=1)
    initial_score = model.score(sample.bytes)
    trace = run_blackbox_bytes(sample, "partial_dos", counter, cfg, initial_score)

    # Every query is a trace step
    assert counter.count == len(trace.steps) == 60
    assert exemplio.manipulations.apply(sample.bytes, "partial_dos").size == 58
    assert trace.initial_score == initial_score
    assert trace.final_score == model.score(trace.final_bytes)
    assert trace.final_score <= trace.steps[0].score
    assert trace.final_bytes[60:] == sample.bytes[60:]
    assert exemplio.validate(trace.final_bytes).ok


def test_run_blackbox_bytes_no_editable_bytes():
    data = helpers.make_pe(sections=[{"size": 512}, {"size": 512}])

    with pytest.raises(NoEditableBytesInWindow):
        run_blackbox_bytes(data, "slack_fill", helpers.ZeroCounter())


def test_gamma_fitness():
    model = helpers.ZeroCounter()
    payload = SectionPayload(bytes(range(200)) * 5, ".data", "a.exe")
    cfg = GammaConfig(lambda_=1.0e-5, payloads=[payload])

    assert gamma_fitness(sample, [0.0], model, cfg) == model.score(sample.bytes)

    candidate, injected = gamma_candidate(sample.bytes, [1.0], cfg)
    fitness = gamma_fitness(sample, Genome([1.0]), model, cfg)
    assert injected == 1000
    assert candidate == sample.bytes + payload.content
    assert fitness - model.score(candidate) == pytest.approx(0.01)

    cfg = cfg._replace(lambda_=0.0)
    assert gamma_fitness(sample, [1.0], model, cfg) == model.score(candidate)


def test_gamma_candidate():
    payloads = [
        SectionPayload(bytes(100), ".data"),
        SectionPayload(b"x" * 200, ".rsrc"),
    ]
    cfg = GammaConfig(payloads=payloads)

    candidate, injected = gamma_candidate(sample.bytes, [1.0, 0.5], cfg)
    assert injected == 200
    assert candidate == sample.bytes + bytes(100) + b"x" * 100

    cfg = cfg._replace(binary=True)
    candidate, injected = gamma_candidate(sample.bytes, [0.2, 0.5], cfg)
    assert injected == 200
    assert candidate == sample.bytes + b"x" * 200

    data = helpers.make_pe(size_of_headers=1024)
    cfg = GammaConfig(payloads=payloads, mode="section-injection")
    candidate, injected = gamma_candidate(data, [1.0, 1.0], cfg)
    pe = exemplio.parse(candidate)
    assert injected == 300
    assert pe.num_sections == 4
    assert [s.label for s in pe.sections[2:]] == [".data", ".rsrc"]
    assert exemplio.validate(candidate).ok

    with pytest.raises(LengthMismatch):
        gamma_candidate(data, [1.0], cfg)


def test_run_gamma():
    model = helpers.ConstantClassifier(0.9)
    payloads = [SectionPayload(bytes(1000), ".data") for _ in range(3)]
    cfg = GammaConfig(lambda_=1.0e6, payloads=payloads)
    trace = run_gamma(sample, model, cfg, initial_score=0.9)

    # The unattacked score is not queried
    assert len(trace.steps) == 500
    assert model.calls == 500
    assert trace.initial_score == 0.9
    assert trace.steps[-1].injected < 512
    assert len(trace.final_bytes) - len(sample.bytes) == trace.steps[-1].injected
    assert not trace.succeeded


def test_run_gamma_evades():
    model = helpers.ZeroCounter(threshold=0.9)
    payloads = [SectionPayload(bytes(20000), ".data")]
    cfg = GammaConfig(lambda_=0.0, payloads=payloads)
    trace = run_gamma(sample, model, cfg, GeneticConfig(max_queries=50))

    assert trace.succeeded
    assert trace.final_score < 0.9


def test_run_gamma_no_header_room():
    payloads = [SectionPayload(bytes(10), ".data") for _ in range(2)]
    cfg = GammaConfig(payloads=payloads, mode="section-injection")

    with pytest.raises(NoHeaderRoom):
        run_gamma(helpers.make_pe(), helpers.ZeroCounter(), cfg)


def test_gamma_config():
    dirname = helpers.tempdir()
    payloads = [SectionPayload(b"abc", ".data")]
    exemplio.manipulations.write_payloads(dirname, payloads)
    cfg = GammaConfig.from_dict({"lambda": 0.5, "payloads": dirname, "binary": True})

    assert cfg.lambda_ == 0.5
    assert cfg.payloads == tuple(payloads)
    assert cfg.mode == "padding"
    assert cfg.binary

    with pytest.raises(ConfigError):
        GammaConfig.from_dict({"lambda": -1.0, "payloads": dirname})

    with pytest.raises(ConfigError):
        GammaConfig.from_dict({"payloads": dirname, "mode": "overlay"})

    with pytest.raises(ConfigError):
        GammaConfig.from_dict({"lambda": 0.5})


def write_goodware(dirname, n, **kwargs):
    os.makedirs(dirname, exist_ok=True)
    for i in range(n):
        filename = os.path.join(dirname, f"{i:04d}.exe")
        exemplio.write_exe(filename, helpers.make_pe(seed=i, **kwargs))


def test_harvest_sections():
    dirname = helpers.tempdir()
    write_goodware(dirname, 10, num_sections=3)
    with open(os.path.join(dirname, "readme.txt"), "w") as f:
        f.write("not a program")
    payloads = harvest_sections(dirname)

    assert len(payloads) == 10
    assert all(payload.name == ".data" for payload in payloads)
    assert [payload.source_sample for payload in payloads] == [
        f"{i:04d}.exe" for i in range(10)
    ]
    assert all(len(payload.content) == 300 for payload in payloads)

    with pytest.raises(NoPayloadsFound):
        harvest_sections(dirname, ".tls")


def test_harvest_sections_max_count():
    dirname = helpers.tempdir()
    write_goodware(dirname, 20, num_sections=10, size_of_headers=1024)
    payloads = harvest_sections(dirname, "*", max_count=100)

    assert len(payloads) == 100
    assert payloads == harvest_sections(dirname, "*", max_count=100)
    assert payloads[0].source_sample == "0000.exe"
    assert payloads[99].source_sample == "0009.exe"
