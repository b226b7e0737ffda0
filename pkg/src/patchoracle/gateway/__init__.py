from .backend import (
    DEFAULT_MAX_OUTPUT_TOKENS,
    DEFAULT_TEMPERATURE,
    BackendResponse,
    HTTPBackend,
    ScriptedBackend,
)
from .gateway import Budget, GatewayMode, LLMGateway, LLMResponse, Transcript, TranscriptEntry
from .parsing import (
    ReviewOutcome,
    ReviewVerdict,
    extract_final_program,
    parse_review_verdict,
    validate_and_parse_oracle,
)
from .prompts import (
    FALSE_POSITIVE_MARKER,
    POST_PLACEHOLDER,
    PRE_PLACEHOLDER,
    TRUE_POSITIVE_MARKER,
    Phase,
    Prompt,
    build_prompt,
    template_version,
)

__all__ = [
    "BackendResponse",
    "Budget",
    "DEFAULT_MAX_OUTPUT_TOKENS",
    "DEFAULT_TEMPERATURE",
    "FALSE_POSITIVE_MARKER",
    "GatewayMode",
    "HTTPBackend",
    "LLMGateway",
    "LLMResponse",
    "POST_PLACEHOLDER",
    "PRE_PLACEHOLDER",
    "Phase",
    "Prompt",
    "ReviewOutcome",
    "ReviewVerdict",
    "ScriptedBackend",
    "TRUE_POSITIVE_MARKER",
    "Transcript",
    "TranscriptEntry",
    "build_prompt",
    "extract_final_program",
    "parse_review_verdict",
    "template_version",
    "validate_and_parse_oracle",
]
