"""Pluggable text-completion backends.

A backend is one call: (system text, user text, temperature, max output
tokens) -> (text, token counts). The HTTP backend speaks the common
chat-completions wire format; the scripted backend returns canned responses
and is what tests and golden-bundle recording use.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass

from ..errors import BackendError, ConfigError

logger = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_OUTPUT_TOKENS = 16384


@dataclass(frozen=True)
class BackendResponse:
    text: str
    input_tokens: int
    output_tokens: int
    backend_id: str


class HTTPBackend:
    """Chat-completions backend over HTTP.

    The API key is read from the environment variable named by
    ``api_key_env`` and never stored in configuration files.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = "LLM_API_KEY",
        max_retries: int = 3,
        timeout: float = 120.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.max_retries = max_retries
        self.timeout = timeout
        self._api_key = os.environ.get(api_key_env)
        if not self._api_key:
            raise ConfigError(f"environment variable {api_key_env} is not set")

    @property
    def backend_id(self) -> str:
        return f"http:{self.model}"

    def complete(
        self, system: str, user: str, temperature: float, max_output_tokens: int
    ) -> BackendResponse:
        import httpx

        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": temperature,
            "max_tokens": max_output_tokens,
        }
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                resp = httpx.post(
                    f"{self.base_url}/chat/completions",
                    json=payload,
                    headers={"Authorization": f"Bearer {self._api_key}"},
                    timeout=self.timeout,
                )
                if resp.status_code >= 500:
                    raise BackendError(f"server error {resp.status_code}")
                resp.raise_for_status()
                data = resp.json()
                usage = data.get("usage", {})
                return BackendResponse(
                    text=data["choices"][0]["message"]["content"],
                    input_tokens=int(usage.get("prompt_tokens", 0)),
                    output_tokens=int(usage.get("completion_tokens", 0)),
                    backend_id=self.backend_id,
                )
            except (httpx.TransportError, BackendError) as exc:
                last_error = exc
                if attempt < self.max_retries:
                    delay = 2.0**attempt
                    logger.warning("backend call failed (%s); retrying in %.0fs", exc, delay)
                    time.sleep(delay)
            except httpx.HTTPStatusError as exc:
                raise BackendError(str(exc)) from exc
        raise BackendError(f"backend unavailable after {self.max_retries + 1} attempts: {last_error}")


class ScriptedBackend:
    """Returns a fixed sequence of responses; raises when exhausted.

    Token counts are deterministic word counts so accounting tests have
    stable numbers to check against.
    """

    def __init__(self, responses: list[str], backend_id: str = "scripted"):
        self.responses = list(responses)
        self.backend_id = backend_id
        self.calls = 0
        self.seen_prompts: list[tuple[str, str]] = []  # (system, user) per call

    def complete(
        self, system: str, user: str, temperature: float, max_output_tokens: int
    ) -> BackendResponse:
        if self.calls >= len(self.responses):
            raise BackendError(
                f"scripted backend exhausted after {len(self.responses)} responses"
            )
        text = self.responses[self.calls]
        self.calls += 1
        self.seen_prompts.append((system, user))
        return BackendResponse(
            text=text,
            input_tokens=len(system.split()) + len(user.split()),
            output_tokens=len(text.split()),
            backend_id=self.backend_id,
        )
