import collections
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .._common import check_keys
from .._exceptions import BudgetTooSmall, ConfigError
from .._trace import AttackTrace, TraceStep

__all__ = [
    "Genome",
    "GeneticConfig",
    "Evaluation",
    "run_genetic",
]


TOURNAMENT_SIZE = 3


class Genome(collections.namedtuple("Genome", ["genes"])):
    __slots__ = ()

    def __new__(cls, genes):
        """Real vector of genes, clamped to [0, 1]."""
        genes = np.clip(np.asarray(genes, dtype=np.float64).ravel(), 0.0, 1.0)

        return super().__new__(cls, genes)

    def __len__(self):
        """Return number of genes."""
        return len(self.genes)


Evaluation = collections.namedtuple(
    "Evaluation",
    ["fitness", "score", "detected", "injected"],
    defaults=(None, None, 0),
)


class GeneticConfig(
    collections.namedtuple(
        "GeneticConfig",
        [
            "population_size",
            "max_queries",
            "crossover_rate",
            "mutation_rate",
            "mutation_sigma",
            "elitism_count",
            "seed",
            "jobs",
        ],
    )
):
    __slots__ = ()

    def __new__(
        cls,
        population_size=10,
        max_queries=500,
        crossover_rate=0.7,
        mutation_rate=0.3,
        mutation_sigma=0.15,
        elitism_count=1,
        seed=0,
        jobs=1,
    ):
        """
        Genetic optimizer configuration.

        Parameters
        ----------
        population_size : int, optional, default 10
            Number of individuals per generation.
        max_queries : int, optional, default 500
            Maximum number of objective evaluations.
        crossover_rate : scalar, optional, default 0.7
            Probability of uniform crossover for each child.
        mutation_rate : scalar, optional, default 0.3
            Probability of Gaussian mutation for each gene.
        mutation_sigma : scalar, optional, default 0.15
            Standard deviation of Gaussian mutations.
        elitism_count : int, optional, default 1
            Number of best individuals carried over unchanged.
        seed : int, optional, default 0
            Random seed.
        jobs : int, optional, default 1
            Number of threads evaluating the individuals of a generation.

        """
        if population_size < 2:
            raise ValueError("Population size must be at least 2.")

        if not 1 <= elitism_count < population_size:
            raise ValueError("Elitism count must be in [1, population_size).")

        for name, rate in zip(
            ("crossover_rate", "mutation_rate"), (crossover_rate, mutation_rate)
        ):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"Option '{name}' must be in [0, 1].")

        if mutation_sigma < 0.0:
            raise ValueError("Mutation sigma must be non-negative.")

        if jobs < 1:
            raise ValueError("Number of jobs must be at least 1.")

        return super().__new__(
            cls,
            int(population_size),
            int(max_queries),
            float(crossover_rate),
            float(mutation_rate),
            float(mutation_sigma),
            int(elitism_count),
            int(seed),
            int(jobs),
        )

    @classmethod
    def from_dict(cls, data):
        """Build a configuration from a mapping, rejecting unknown keys."""
        check_keys(data, cls._fields, "genetic configuration")
        try:
            return cls(**data)

        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid genetic configuration: {e}")


def run_genetic(objective, k, cfg=None):
    """
    Minimize an objective with a genetic algorithm.

    Generations use tournament selection (size 3), uniform crossover,
    Gaussian gene mutation clamped to [0, 1], and elitism. Elites are carried
    over without being evaluated again.

    Parameters
    ----------
    objective : callable
        Function of a gene vector returning a scalar (lower is better) or an
        :class:`Evaluation`.
    k : int
        Number of genes.
    cfg : GeneticConfig or None, optional, default None
        Optimizer configuration.

    Returns
    -------
    Genome
        Best genome found.
    AttackTrace
        One step per objective evaluation (effort = number of evaluations so
        far) holding the best-so-far evaluation.

    """
    cfg = cfg if cfg is not None else GeneticConfig()
    if k < 1:
        raise ValueError("Genome length must be at least 1.")

    if cfg.max_queries < cfg.population_size:
        raise BudgetTooSmall(
            f"Query budget {cfg.max_queries} is smaller than population size "
            f"{cfg.population_size}."
        )

    rng = np.random.default_rng(cfg.seed)
    steps = []
    best = {"genes": None, "evaluation": None}

    def evaluate(genomes):
        if cfg.jobs > 1:
            with ThreadPoolExecutor(max_workers=cfg.jobs) as executor:
                results = list(executor.map(objective, genomes))
        else:
            results = [objective(genes) for genes in genomes]

        out = []
        for genes, result in zip(genomes, results):
            if not isinstance(result, Evaluation):
                result = Evaluation(float(result), float(result))

            out.append(result)
            current = best["evaluation"]
            if current is None or result.fitness < current.fitness:
                best["genes"], best["evaluation"] = genes.copy(), result

            ev = best["evaluation"]
            effort = len(steps) + 1
            steps.append(
                TraceStep(effort, ev.score, ev.detected, ev.injected, ev.fitness)
            )

        return out

    population = rng.random((cfg.population_size, k))
    evaluations = evaluate(list(population))

    generation = 0
    while len(steps) < cfg.max_queries:
        generation += 1
        fitness = np.array([ev.fitness for ev in evaluations])
        order = np.argsort(fitness, kind="stable")
        elites = order[: cfg.elitism_count]

        def tournament():
            idx = rng.integers(0, len(population), TOURNAMENT_SIZE)
            return population[idx[np.argmin(fitness[idx])]]

        n_children = min(
            cfg.population_size - cfg.elitism_count, cfg.max_queries - len(steps)
        )
        children = []
        for _ in range(n_children):
            parent1, parent2 = tournament(), tournament()
            if rng.random() < cfg.crossover_rate:
                mask = rng.random(k) < 0.5
                child = np.where(mask, parent1, parent2)
            else:
                child = parent1.copy()

            mutate = rng.random(k) < cfg.mutation_rate
            child[mutate] += rng.normal(0.0, cfg.mutation_sigma, mutate.sum())
            children.append(np.clip(child, 0.0, 1.0))

        population = np.vstack([population[elites]] + children)
        evaluations = [evaluations[i] for i in elites] + evaluate(children)

        logging.debug(
            f"Generation {generation}: best fitness = "
            f"{best['evaluation'].fitness:.6f} ({len(steps)} queries)"
        )

    trace = AttackTrace(
        steps,
        b"",
        best["evaluation"].detected is False,
        None,
        0,
    )

    return Genome(best["genes"]), trace
