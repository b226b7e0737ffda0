"""Run configuration with flags > environment > config file > defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError
from .gateway.gateway import GatewayMode
from .orchestrator.state import Budgets

ENV_PREFIX = "PATCHORACLE_"


@dataclass(frozen=True)
class SandboxConfig:
    backend: str = "subprocess"  # subprocess | container | stub
    interpreter: str | None = None
    image: str = ""
    timeout: float = 120.0
    parallelism: int = 4
    shim_path: str | None = None
    pythonpath: tuple[str, ...] = ()


@dataclass(frozen=True)
class BackendConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = ""
    api_key_env: str = "LLM_API_KEY"
    temperature: float = 0.7
    max_output_tokens: int = 16384


@dataclass(frozen=True)
class RunConfig:
    mode: GatewayMode = GatewayMode.LIVE
    budgets: Budgets = field(default_factory=Budgets)
    sandbox: SandboxConfig = field(default_factory=SandboxConfig)
    backend: BackendConfig = field(default_factory=BackendConfig)
    output_dir: Path = Path("runs")
    bundle: Path | None = None
    forge_url: str = "https://api.github.com"
    cache_dir: Path = Path("cache")
    distill: bool = True

    def validate(self) -> None:
        if self.mode is GatewayMode.REPLAY and self.bundle is None:
            raise ConfigError("replay mode requires a bundle (transcript) path")
        if self.mode in (GatewayMode.LIVE, GatewayMode.RECORD) and not self.backend.model:
            raise ConfigError(f"{self.mode.value} mode requires a backend model")
        if self.sandbox.backend not in ("subprocess", "container", "stub"):
            raise ConfigError(f"unknown sandbox backend {self.sandbox.backend!r}")
        if self.sandbox.backend == "container" and not self.sandbox.image:
            raise ConfigError("container sandbox requires an image name")


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name)


def load_config(config_file: Path | str | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults, config file, environment, and explicit overrides, in
    ascending precedence."""
    merged: dict = {}

    if config_file:
        path = Path(config_file)
        if not path.is_file():
            raise ConfigError(f"config file {path} not found")
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must contain a mapping")
        merged.update(data)

    env_map = {
        "mode": _env("MODE"),
        "output_dir": _env("OUT"),
        "bundle": _env("BUNDLE"),
        "forge_url": _env("FORGE_URL"),
        "cache_dir": _env("CACHE_DIR"),
        "max_llm_calls": _env("MAX_LLM_CALLS"),
        "max_enhancements": _env("MAX_ENHANCEMENTS"),
        "review_cap": _env("REVIEW_CAP"),
        "repair_cap": _env("REPAIR_CAP"),
        "sandbox_backend": _env("SANDBOX"),
        "sandbox_timeout": _env("TIMEOUT"),
        "shim_path": _env("SHIM"),
        "backend_model": _env("MODEL"),
        "backend_url": _env("BACKEND_URL"),
        "api_key_env": _env("API_KEY_ENV"),
    }
    merged.update({k: v for k, v in env_map.items() if v is not None})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    budgets = Budgets(
        max_llm_calls=int(merged.get("max_llm_calls", 25)),
        max_enhancements=int(merged.get("max_enhancements", 5)),
        review_cap=int(merged.get("review_cap", 3)),
        repair_cap=int(merged.get("repair_cap", 3)),
        format_retries=int(merged.get("format_retries", 3)),
    )
    try:
        mode = GatewayMode(str(merged.get("mode", "live")).lower())
    except ValueError as exc:
        raise ConfigError(f"unknown mode {merged.get('mode')!r}") from exc

    # replayed bundles carry recorded execution outcomes; without an explicit
    # choice they run on the stub sandbox
    default_sandbox = "stub" if mode is GatewayMode.REPLAY else "subprocess"
    sandbox = SandboxConfig(
        backend=str(merged.get("sandbox_backend", default_sandbox)),
        interpreter=merged.get("interpreter"),
        image=str(merged.get("image", "")),
        timeout=float(merged.get("sandbox_timeout", 120.0)),
        parallelism=int(merged.get("parallelism", 4)),
        shim_path=merged.get("shim_path"),
        pythonpath=tuple(merged.get("pythonpath", ()) or ()),
    )
    backend = BackendConfig(
        base_url=str(merged.get("backend_url", "https://api.openai.com/v1")),
        model=str(merged.get("backend_model", "")),
        api_key_env=str(merged.get("api_key_env", "LLM_API_KEY")),
        temperature=float(merged.get("temperature", 0.7)),
        max_output_tokens=int(merged.get("max_output_tokens", 16384)),
    )

    return RunConfig(
        mode=mode,
        budgets=budgets,
        sandbox=sandbox,
        backend=backend,
        output_dir=Path(merged.get("output_dir", "runs")),
        bundle=Path(merged["bundle"]) if merged.get("bundle") else None,
        forge_url=str(merged.get("forge_url", "https://api.github.com")),
        cache_dir=Path(merged.get("cache_dir", "cache")),
        distill=bool(merged.get("distill", True)),
    )

