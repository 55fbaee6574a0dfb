"""Minimal chat-completion client used by the external estimator."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import httpx

ENV_CONFIG = "ADAPTGRASP_CHAT_CONFIG"
ENV_BASE_URL = "ADAPTGRASP_CHAT_BASE_URL"
ENV_MODEL = "ADAPTGRASP_CHAT_MODEL"
DEFAULT_KEY_ENV = "ADAPTGRASP_CHAT_API_KEY"
RETRY_STATUS = {429, 500, 502, 503, 504}


class UpstreamError(RuntimeError):
    def __init__(self, message: str, transcript: list[dict] | None = None):
        super().__init__(message)
        self.transcript = transcript or []


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ChatConfig:
    base_url: str
    model: str
    api_key_env: str = DEFAULT_KEY_ENV
    timeout: float = 30.0
    temperature: float = 0.7
    max_retries: int = 2

    @classmethod
    def load(cls, path: str | Path | None = None, environ=None) -> "ChatConfig":
        """JSON file first (argument or env var), then env overrides."""
        env = os.environ if environ is None else environ
        values: dict = {}
        path = path or env.get(ENV_CONFIG)
        if path:
            try:
                values.update(json.loads(Path(path).read_text(encoding="utf-8")))
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"cannot read chat config {path}: {e}") from None
        if env.get(ENV_BASE_URL):
            values["base_url"] = env[ENV_BASE_URL]
        if env.get(ENV_MODEL):
            values["model"] = env[ENV_MODEL]
        for key in ("base_url", "model"):
            if not values.get(key):
                raise ConfigError(f"chat endpoint not configured: {key} missing")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown chat config keys: {sorted(unknown)}")
        return cls(**values)

    def api_key(self, environ=None) -> str | None:
        env = os.environ if environ is None else environ
        return env.get(self.api_key_env)


@dataclass
class ChatClient:
    config: ChatConfig
    transport: httpx.BaseTransport | None = None
    environ: dict | None = None
    transcript: list[dict] = field(default_factory=list)

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        key = self.config.api_key(self.environ)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def complete(self, prompt: str) -> str:
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        }
        attempts: list[dict] = []
        with httpx.Client(timeout=self.config.timeout, transport=self.transport) as client:
            for _ in range(self.config.max_retries + 1):
                try:
                    resp = client.post(url, json=body, headers=self._headers())
                except httpx.HTTPError as e:
                    attempts.append({"request": body, "error": repr(e)})
                    continue
                attempts.append({"request": body, "status": resp.status_code, "response": resp.text})
                if resp.status_code in RETRY_STATUS:
                    continue
                if resp.status_code >= 400:
                    break
                try:
                    content = resp.json()["choices"][0]["message"]["content"]
                except (ValueError, KeyError, IndexError, TypeError):
                    raise UpstreamError("malformed chat response", attempts) from None
                self.transcript.extend(attempts)
                return content
        self.transcript.extend(attempts)
        raise UpstreamError(f"chat request to {url} failed", attempts)

    def query_parallel(self, prompt: str, n: int) -> list[str]:
        """Issue n identical queries concurrently; results keep submission order."""
        if n < 1:
            raise ValueError("query count must be at least 1")
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(lambda _: self.complete(prompt), range(n)))
