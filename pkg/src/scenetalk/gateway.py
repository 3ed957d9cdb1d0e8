"""Model-provider abstraction.

Four interchangeable backends sit behind one ``complete(messages)`` call:

- HttpBackend speaks the de-facto chat-completions JSON shape.
- ScriptedBackend answers from an ordered rule table, deterministically,
  for offline tests and demos.
- RecordingBackend wraps another backend and persists every exchange to a
  JSON-lines cassette.
- ReplayBackend serves a cassette back in order, byte-identically.

The resolved API key is read from the environment at call time and is
never logged, never stored on the config, and never written to cassettes.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import requests


class GatewayError(Exception):
    """Base class for provider failures."""


class AuthError(GatewayError):
    pass


class RateLimitError(GatewayError):
    pass


class GatewayTimeoutError(GatewayError):
    pass


class TransportError(GatewayError):
    pass


class ReplayExhausted(GatewayError):
    pass


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    model: str
    api_key_env: str = "SCENETALK_API_KEY"
    temperature: float = 0.2
    timeout_seconds: float = 30.0
    max_retries: int = 2

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError(f"temperature {self.temperature} must be >= 0")
        if self.max_retries < 0:
            raise ValueError(f"max_retries {self.max_retries} must be >= 0")

    @classmethod
    def from_env(cls, env=os.environ) -> "ProviderConfig":
        return cls(
            endpoint=env.get("SCENETALK_ENDPOINT", "https://api.openai.com/v1/chat/completions"),
            model=env.get("SCENETALK_MODEL", "gpt-4o"),
            api_key_env=env.get("SCENETALK_KEY_ENV", "SCENETALK_API_KEY"),
            temperature=float(env.get("SCENETALK_TEMPERATURE", "0.2")),
        )


class Backend(Protocol):
    def complete(self, messages: list[dict]) -> str: ...


_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)
_SPACE_RE = re.compile(r"\s+")


def normalize(text: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    return _SPACE_RE.sub(" ", _PUNCT_RE.sub("", text.lower())).strip()


@dataclass(frozen=True)
class ScriptedRule:
    pattern: str  # matched as a normalized substring of the user message
    response: str


class ScriptedBackend:
    """Deterministic canned backend: first rule whose normalized pattern
    is a substring of the normalized latest user message wins."""

    def __init__(self, rules: list[ScriptedRule], fallback: str):
        self.rules = list(rules)
        self.fallback = fallback

    def complete(self, messages: list[dict]) -> str:
        if not messages:
            raise ValueError("messages must be non-empty")
        latest = next(
            (m["content"] for m in reversed(messages) if m["role"] == "user"), ""
        )
        needle = normalize(latest)
        for rule in self.rules:
            if normalize(rule.pattern) in needle:
                return rule.response
        return self.fallback

    @classmethod
    def from_json(cls, path: str | Path) -> "ScriptedBackend":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        rules = [ScriptedRule(r["pattern"], r["response"]) for r in data["rules"]]
        return cls(rules, data["fallback"])


class HttpBackend:
    """Chat-completions HTTP client with bounded exponential backoff
    (base 1 s, factor 2) on transient failures."""

    def __init__(
        self,
        config: ProviderConfig,
        post: Callable = requests.post,
        sleep: Callable[[float], None] = time.sleep,
        env=os.environ,
    ):
        self.config = config
        self._post = post
        self._sleep = sleep
        self._env = env

    def complete(self, messages: list[dict]) -> str:
        if not messages:
            raise ValueError("messages must be non-empty")
        key = self._env.get(self.config.api_key_env, "")
        if not key:
            raise AuthError(
                f"no API key: environment variable {self.config.api_key_env!r} is unset or empty"
            )
        payload = {
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
        }
        attempt = 0
        while True:
            try:
                return self._attempt(payload, key)
            except (RateLimitError, GatewayTimeoutError, TransportError) as e:
                if attempt >= self.config.max_retries:
                    raise
                self._sleep(1.0 * (2.0**attempt))
                attempt += 1
                last = e
                del last

    def _attempt(self, payload: dict, key: str) -> str:
        try:
            response = self._post(
                self.config.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {key}"},
                timeout=self.config.timeout_seconds,
            )
        except requests.Timeout as e:
            raise GatewayTimeoutError(f"request timed out after {self.config.timeout_seconds}s") from e
        except requests.RequestException as e:
            raise TransportError(str(e)) from e
        status = response.status_code
        if status in (401, 403):
            raise AuthError(f"provider rejected credentials (HTTP {status})")
        if status == 429:
            raise RateLimitError("provider rate limit (HTTP 429)")
        if status >= 500:
            raise TransportError(f"provider error (HTTP {status})")
        if status != 200:
            raise TransportError(f"unexpected HTTP {status}")
        try:
            data = response.json()
            return data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise TransportError(f"malformed provider response: {e}") from e


class RecordingBackend:
    """Wraps another backend and appends every exchange to a cassette."""

    def __init__(self, inner: Backend, cassette_path: str | Path):
        self.inner = inner
        self.path = Path(cassette_path)

    def complete(self, messages: list[dict]) -> str:
        response = self.inner.complete(messages)
        record = {"request": messages, "response": response}
        with self.path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
        return response


class ReplayBackend:
    """Serves a recorded cassette back in order."""

    def __init__(self, cassette_path: str | Path):
        self.path = Path(cassette_path)
        self._responses: list[str] = []
        with self.path.open(encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    self._responses.append(json.loads(line)["response"])
        self._cursor = 0

    def complete(self, messages: list[dict]) -> str:
        if self._cursor >= len(self._responses):
            raise ReplayExhausted(
                f"cassette {self.path.name} has {len(self._responses)} exchanges, "
                f"request {self._cursor + 1} exceeds it"
            )
        response = self._responses[self._cursor]
        self._cursor += 1
        return response
