"""Per-run artifact directory: oracle revisions, built programs, execution
results, an append-only run log, and the final report.

Everything written here is deterministic under replay; wall-clock data is
confined to ``metadata.json`` so replay determinism can be checked by
hashing the rest of the directory.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..oracle.model import PatchOracle
from ..sandbox.result import ExecutionResult
from .state import ValidationReport

METADATA_FILE = "metadata.json"


class RunArtifacts:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._log_path = self.root / "run.log"
        self._log_path.write_text("", encoding="utf-8")
        self._exec_seq = 0

    def log(self, event: str, **fields) -> None:
        record = {"event": event, **fields}
        with self._log_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def read_log(self) -> list[dict]:
        return [
            json.loads(line)
            for line in self._log_path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]

    def write_oracle(self, oracle: PatchOracle) -> None:
        oracle.save(self.root / f"oracle_rev{oracle.revision}.json")

    def next_execution_seq(self) -> int:
        seq = self._exec_seq
        self._exec_seq += 1
        return seq

    def write_program(self, seq: int, revision: int, source: str) -> None:
        path = self.root / f"program_{seq:03d}_rev{revision}.py"
        path.write_text(source, encoding="utf-8")

    def write_result(self, seq: int, result: ExecutionResult) -> None:
        path = self.root / f"result_{seq:03d}.json"
        path.write_text(
            json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    def write_report(self, report: ValidationReport) -> None:
        (self.root / "report.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    def write_metadata(self, **fields) -> None:
        (self.root / METADATA_FILE).write_text(
            json.dumps(fields, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
