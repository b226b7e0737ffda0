from .mutants import Mutant, MutationOperator, generate_mutants
from .scoring import MutantOutcome, MutationScoreReport, mutation_score

__all__ = [
    "Mutant",
    "MutantOutcome",
    "MutationOperator",
    "MutationScoreReport",
    "generate_mutants",
    "mutation_score",
]
