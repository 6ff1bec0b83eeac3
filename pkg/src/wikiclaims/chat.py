"""OpenAI-compatible chat-completions client with retry and backoff."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import httpx


@dataclass
class ChatConfig:
    base_url: str
    api_key: str = ""
    model: str = "mistralai/Mistral-7B-Instruct-v0.3"
    temperature: float = 0.7
    max_tokens: int = 512
    max_retries: int = 3
    backoff_seconds: float = 0.5
    timeout_seconds: float = 60.0
    concurrency: int = 8


class ChatEndpointError(Exception):
    """Non-retryable endpoint failure (4xx, bad payload)."""


class ChatUnavailableError(Exception):
    """Retries exhausted; carries context so the caller can checkpoint."""

    def __init__(self, message: str, context: Optional[dict] = None):
        super().__init__(message)
        self.context = context or {}


@dataclass
class ChatResult:
    content: str
    retries: int


_RETRYABLE_STATUS = {408, 429, 500, 502, 503, 504}


class ChatClient:
    def __init__(self, config: ChatConfig, transport: Optional[httpx.BaseTransport] = None):
        self.config = config
        headers = {}
        if config.api_key:
            headers["Authorization"] = f"Bearer {config.api_key}"
        self._client = httpx.Client(
            base_url=config.base_url.rstrip("/"),
            headers=headers,
            timeout=config.timeout_seconds,
            transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ChatClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def request_generation(self, prompt: str, context: Optional[dict] = None) -> ChatResult:
        """One single-turn chat completion; returns the assistant content.

        Transient failures (timeouts, 429, 5xx) are retried with exponential
        backoff up to the configured cap; other 4xx fail immediately.
        """
        payload = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        retries = 0
        last_error = "no attempts made"
        while retries <= self.config.max_retries:
            try:
                response = self._client.post("/chat/completions", json=payload)
            except httpx.HTTPError as exc:
                last_error = f"transport error: {exc}"
            else:
                if response.status_code == 200:
                    try:
                        content = response.json()["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, ValueError) as exc:
                        raise ChatEndpointError(f"malformed completion response: {exc}") from exc
                    return ChatResult(content=content, retries=retries)
                if response.status_code not in _RETRYABLE_STATUS:
                    raise ChatEndpointError(
                        f"chat endpoint returned HTTP {response.status_code}: {response.text[:200]}"
                    )
                last_error = f"HTTP {response.status_code}"
            if retries == self.config.max_retries:
                break
            time.sleep(self.config.backoff_seconds * (2**retries))
            retries += 1
        raise ChatUnavailableError(
            f"chat endpoint unavailable after {retries} retries ({last_error})",
            context=context,
        )
