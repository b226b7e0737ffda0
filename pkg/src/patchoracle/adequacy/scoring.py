"""Mutation-based adequacy scoring of a patch oracle.

Each mutant replaces the post-patch function, the comparison program is
rebuilt and executed, and the mutant counts as killed when the status is
anything other than a clean pass. Timeout kills are tallied separately so
scores can be recomputed without them.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from ..context.extract import CodeContext
from ..errors import PatchOracleError
from ..oracle.builder import build_comparison_program
from ..oracle.model import PatchOracle
from ..sandbox.executor import SandboxExecutor
from ..sandbox.result import StatusCode


@dataclass(frozen=True)
class MutantOutcome:
    mutant_id: int
    operator: str
    status: str
    killed: bool
    timed_out: bool


@dataclass(frozen=True)
class MutationScoreReport:
    total: int
    killed: int
    timeout_kills: int
    score: float | None  # None when the mutant set is empty
    outcomes: tuple[MutantOutcome, ...]

    @property
    def score_excluding_timeouts(self) -> float | None:
        live = self.total - self.timeout_kills
        if live == 0:
            return None
        return (self.killed - self.timeout_kills) / live

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "total": self.total,
            "killed": self.killed,
            "timeout_kills": self.timeout_kills,
            "score": self.score,
            "outcomes": [
                {
                    "mutant_id": o.mutant_id,
                    "operator": o.operator,
                    "status": o.status,
                    "killed": o.killed,
                    "timed_out": o.timed_out,
                }
                for o in self.outcomes
            ],
        }


def mutation_score(
    oracle: PatchOracle,
    ctx: CodeContext,
    mutants: list,
    executor: SandboxExecutor,
) -> MutationScoreReport:
    """Fraction of mutants the oracle kills.

    Requires the oracle to pass cleanly on the unmutated post-patch
    function; scoring an already-failing oracle would count its own defects
    as kills.
    """
    green = executor.execute(build_comparison_program(oracle, ctx))
    if green.status.code is not StatusCode.NO_VIOLATION:
        raise PatchOracleError(
            f"oracle is not green on the unmutated function: {green.status.label()} "
            f"({green.message})"
        )

    def run_one(mutant) -> MutantOutcome:
        mutated_ctx = replace(ctx, post_function=mutant.mutated_source)
        result = executor.execute(build_comparison_program(oracle, mutated_ctx))
        timed_out = result.status.code is StatusCode.TIMEOUT
        killed = result.status.code is not StatusCode.NO_VIOLATION
        return MutantOutcome(
            mutant_id=mutant.id,
            operator=mutant.operator.value,
            status=result.status.label(),
            killed=killed,
            timed_out=timed_out,
        )

    if not mutants:
        return MutationScoreReport(0, 0, 0, None, ())

    with ThreadPoolExecutor(max_workers=executor.max_parallel) as pool:
        outcomes = list(pool.map(run_one, mutants))
    outcomes.sort(key=lambda o: o.mutant_id)

    killed = sum(1 for o in outcomes if o.killed)
    timeout_kills = sum(1 for o in outcomes if o.timed_out)
    return MutationScoreReport(
        total=len(outcomes),
        killed=killed,
        timeout_kills=timeout_kills,
        score=killed / len(outcomes),
        outcomes=tuple(outcomes),
    )
