"""Exception types shared across the pipeline.

Every module raises subclasses of :class:`PatchOracleError` so callers can
catch pipeline failures with one handler while still discriminating on the
specific condition.
"""

from __future__ import annotations


class PatchOracleError(Exception):
    """Base class for all errors raised by this package."""


# --- forge / ingestion ---------------------------------------------------


class ForgeError(PatchOracleError):
    """Base class for forge-host communication failures."""


class NotFound(ForgeError):
    pass


class AuthError(ForgeError):
    pass


class RateLimited(ForgeError):
    """The forge asked us to back off; callers may retry later."""


class MalformedDiff(PatchOracleError):
    """Unified diff text violates the format.

    ``byte_offset`` points at the start of the first offending line.
    """

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class SnapshotParseError(PatchOracleError):
    """A changed file failed to parse in one of the snapshots."""

    def __init__(self, path: str, detail: str):
        super().__init__(f"{path}: {detail}")
        self.path = path
        self.detail = detail


# --- context extraction ---------------------------------------------------


class NotInFunction(PatchOracleError):
    """Changed lines sit at module top level, outside any function."""


class Ambiguous(PatchOracleError):
    """Changed lines span more than one definition."""


class UnresolvableRelativeImport(PatchOracleError):
    """A relative import climbs above the package root."""


# --- LLM gateway -----------------------------------------------------------


class MissingContext(PatchOracleError):
    """A prompt template requires a context field that was not supplied."""

    def __init__(self, field: str):
        super().__init__(f"missing context field: {field}")
        self.field = field


class BudgetExhausted(PatchOracleError):
    """The per-run LLM call budget is spent; no backend call was made."""


class BackendError(PatchOracleError):
    """Transport or server-side failure after retries were exhausted."""


class TranscriptMismatch(PatchOracleError):
    """Replay diverged from the recorded transcript."""


class FormatError(PatchOracleError):
    """An LLM response does not follow the mandated output format.

    ``reasons`` is machine-readable and gets embedded in the retry prompt.
    """

    def __init__(self, reasons: list[str]):
        super().__init__("; ".join(reasons))
        self.reasons = list(reasons)


# --- oracle / comparison-program construction ------------------------------


class PlaceholderMissing(PatchOracleError):
    """Template lacks (or duplicates) a pre/post implementation placeholder."""


class NameCollision(PatchOracleError):
    """A prefixed implementation name already exists among the dependencies."""


class ParseFailure(PatchOracleError):
    """The assembled comparison program does not parse."""


class InvalidEdit(PatchOracleError):
    """An oracle edit references a bad index or produces unparseable code."""


# --- sandbox ----------------------------------------------------------------


class SandboxUnavailable(PatchOracleError):
    """The configured sandbox backend cannot run on this host."""


class ImagePreparationFailed(PatchOracleError):
    """Building or preparing the execution environment failed."""


# --- orchestrator ------------------------------------------------------------


class UnresolvableError(PatchOracleError):
    """Error repair gave up on a recurring execution failure."""


class PipelineError(PatchOracleError):
    """Unrecoverable pipeline failure, wrapping the module-level cause."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class ConfigError(PatchOracleError):
    """Invalid or incomplete run configuration."""
