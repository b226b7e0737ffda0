"""The gateway: budgeted LLM calls with record/replay transcripts.

Every call in the whole pipeline flows through :meth:`LLMGateway.complete`,
which is what makes the call budget and the token accounting trustworthy:
the budget counter increments exactly once per successful call and the
counts sum over transcript entries.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from ..errors import BudgetExhausted, TranscriptMismatch
from .backend import DEFAULT_MAX_OUTPUT_TOKENS, DEFAULT_TEMPERATURE, BackendResponse
from .prompts import Prompt


@dataclass(frozen=True)
class LLMResponse:
    text: str
    input_tokens: int
    output_tokens: int
    backend_id: str

    def __post_init__(self):
        if self.input_tokens < 0 or self.output_tokens < 0:
            raise ValueError("token counts must be non-negative")


class Budget:
    """Per-pipeline call and token accounting; thread-safe."""

    def __init__(self, max_calls: int):
        if max_calls <= 0:
            raise ValueError("max_calls must be positive")
        self.max_calls = max_calls
        self.calls_used = 0
        self.input_tokens = 0
        self.output_tokens = 0
        self._lock = threading.Lock()

    @property
    def exhausted(self) -> bool:
        return self.calls_used >= self.max_calls

    def charge(self, response: LLMResponse) -> None:
        with self._lock:
            self.calls_used += 1
            self.input_tokens += response.input_tokens
            self.output_tokens += response.output_tokens

    def check(self) -> None:
        with self._lock:
            if self.calls_used >= self.max_calls:
                raise BudgetExhausted(
                    f"LLM call budget of {self.max_calls} calls is spent"
                )


@dataclass
class TranscriptEntry:
    prompt_sha256: str
    response: str
    input_tokens: int
    output_tokens: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "prompt_sha256": self.prompt_sha256,
                "response": self.response,
                "input_tokens": self.input_tokens,
                "output_tokens": self.output_tokens,
            },
            sort_keys=True,
        )


class Transcript:
    """Append-only record of (prompt hash, response, token counts).

    Replay consumes entries strictly in order; a hash mismatch or an
    exhausted transcript raises :class:`TranscriptMismatch`.
    """

    def __init__(self, entries: list[TranscriptEntry] | None = None):
        self.entries: list[TranscriptEntry] = list(entries or [])
        self._cursor = 0

    @classmethod
    def load(cls, path: Path | str) -> "Transcript":
        entries = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            data = json.loads(line)
            entries.append(
                TranscriptEntry(
                    prompt_sha256=data["prompt_sha256"],
                    response=data["response"],
                    input_tokens=data["input_tokens"],
                    output_tokens=data["output_tokens"],
                )
            )
        return cls(entries)

    def save(self, path: Path | str) -> None:
        text = "".join(e.to_json() + "\n" for e in self.entries)
        Path(path).write_text(text, encoding="utf-8")

    def append(self, entry: TranscriptEntry) -> None:
        self.entries.append(entry)

    def next_for(self, prompt_hash: str) -> TranscriptEntry:
        if self._cursor >= len(self.entries):
            raise TranscriptMismatch(
                f"transcript exhausted after {len(self.entries)} entries"
            )
        entry = self.entries[self._cursor]
        if entry.prompt_sha256 != prompt_hash:
            raise TranscriptMismatch(
                f"prompt hash mismatch at entry {self._cursor}: "
                f"expected {entry.prompt_sha256[:12]}, got {prompt_hash[:12]}"
            )
        self._cursor += 1
        return entry

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def total_input_tokens(self) -> int:
        return sum(e.input_tokens for e in self.entries)

    @property
    def total_output_tokens(self) -> int:
        return sum(e.output_tokens for e in self.entries)


class GatewayMode(Enum):
    LIVE = "live"
    RECORD = "record"
    REPLAY = "replay"


@dataclass
class LLMGateway:
    """Budgeted, transcript-aware front door to one LLM backend.

    In ``REPLAY`` mode no backend is touched at all; responses come from the
    transcript in order. ``RECORD`` behaves like ``LIVE`` and additionally
    appends every exchange to the transcript.
    """

    backend: object | None
    budget: Budget
    mode: GatewayMode = GatewayMode.LIVE
    transcript: Transcript | None = None
    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    call_log: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.mode in (GatewayMode.RECORD, GatewayMode.REPLAY) and self.transcript is None:
            self.transcript = Transcript()
        if self.mode is GatewayMode.REPLAY and self.transcript is None:
            raise ValueError("replay mode requires a transcript")
        if self.mode in (GatewayMode.LIVE, GatewayMode.RECORD) and self.backend is None:
            raise ValueError(f"{self.mode.value} mode requires a backend")

    def complete(self, prompt: Prompt) -> LLMResponse:
        """One backend call (or transcript entry), charged to the budget."""
        self.budget.check()
        prompt_hash = prompt.sha256()

        if self.mode is GatewayMode.REPLAY:
            assert self.transcript is not None
            entry = self.transcript.next_for(prompt_hash)
            response = LLMResponse(
                text=entry.response,
                input_tokens=entry.input_tokens,
                output_tokens=entry.output_tokens,
                backend_id="replay",
            )
        else:
            raw: BackendResponse = self.backend.complete(  # type: ignore[union-attr]
                prompt.system_text(),
                prompt.user_text(),
                self.temperature,
                self.max_output_tokens,
            )
            response = LLMResponse(
                text=raw.text,
                input_tokens=raw.input_tokens,
                output_tokens=raw.output_tokens,
                backend_id=raw.backend_id,
            )
            if self.mode is GatewayMode.RECORD:
                assert self.transcript is not None
                self.transcript.append(
                    TranscriptEntry(
                        prompt_sha256=prompt_hash,
                        response=response.text,
                        input_tokens=response.input_tokens,
                        output_tokens=response.output_tokens,
                    )
                )

        self.budget.charge(response)
        self.call_log.append(
            {
                "phase": prompt.phase.value,
                "prompt_sha256": prompt_hash,
                "input_tokens": response.input_tokens,
                "output_tokens": response.output_tokens,
            }
        )
        return response
