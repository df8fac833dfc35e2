from ._bytes import run_blackbox_bytes
from ._gamma import GammaConfig, gamma_candidate, gamma_fitness, run_gamma
from ._genetic import Evaluation, GeneticConfig, Genome, run_genetic
from ._harvest import harvest_sections
from ._query import QueryCounter

__all__ = [
    "Genome",
    "GeneticConfig",
    "GammaConfig",
    "Evaluation",
    "QueryCounter",
    "run_genetic",
    "run_blackbox_bytes",
    "gamma_candidate",
    "gamma_fitness",
    "run_gamma",
    "harvest_sections",
]
