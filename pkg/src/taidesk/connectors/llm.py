"""Completion clients: an OpenAI-compatible chat endpoint and a deterministic mock.

The wire client speaks the chat-completions protocol (POST
``{base_url}/chat/completions`` with a bearer token) so any compatible
provider or local stub can serve it. Transient failures (timeouts, transport
errors, 429, 5xx) are retried with exponential backoff and jitter; everything
else fails fast.

The mock is a pure function of the prompt: identical prompts always produce
identical completions, which is what makes replays reproducible.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

import httpx

from ..errors import EmptyCompletion, ProviderError, RateLimited, Timeout
from ..prompts import estimate_tokens, question_segment

MOCK_QUESTION_SNIPPET_CHARS = 80


@dataclass(frozen=True)
class ModelConfig:
    model_id: str
    temperature: float = 0.2
    max_output_tokens: int = 512


@dataclass(frozen=True)
class Completion:
    text: str
    model_id: str
    input_tokens: int
    output_tokens: int
    latency_ms: int


class CompletionClient(Protocol):
    def generate(self, prompt: str, model: ModelConfig) -> Completion: ...


class MockCompletionClient:
    """Deterministic stand-in for the provider.

    Output format (relied on by golden tests):
    ``MOCK(<8 hex chars of sha256(prompt)>): guidance for: <first 80 chars
    of the QUESTION segment>``.
    """

    def generate(self, prompt: str, model: ModelConfig) -> Completion:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:8]
        question = question_segment(prompt)
        snippet = (question if question else prompt).strip()[:MOCK_QUESTION_SNIPPET_CHARS]
        text = f"MOCK({digest}): guidance for: {snippet}"
        return Completion(
            text=text,
            model_id=model.model_id,
            input_tokens=estimate_tokens(prompt),
            output_tokens=estimate_tokens(text),
            latency_ms=0,
        )


class HttpChatClient:
    """Production wire client with bounded retry.

    Retry schedule: ``backoff_base_ms * backoff_factor**n`` with ±``jitter``
    relative noise, at most ``max_retries`` retries after the first attempt.
    ``sleep`` and ``rng`` are injectable so tests never wait.
    """

    def __init__(
        self,
        base_url: str,
        api_token: str,
        *,
        timeout_s: float = 30.0,
        max_retries: int = 2,
        backoff_base_ms: int = 500,
        backoff_factor: float = 2.0,
        jitter: float = 0.2,
        sleep: Callable[[float], None] = time.sleep,
        rng: Optional[random.Random] = None,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self._api_token = api_token
        self.timeout_s = timeout_s
        self.max_retries = max_retries
        self.backoff_base_ms = backoff_base_ms
        self.backoff_factor = backoff_factor
        self.jitter = jitter
        self._sleep = sleep
        self._rng = rng or random.Random()
        self.attempts_made = 0  # cumulative, for tests and metrics

    def generate(self, prompt: str, model: ModelConfig) -> Completion:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        payload = {
            "model": model.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": model.temperature,
            "max_tokens": model.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self._api_token}"}
        url = f"{self.base_url}/chat/completions"

        last_failure: Exception = ProviderError("no attempt made")
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self._backoff_seconds(attempt - 1))
            self.attempts_made += 1
            started = time.monotonic()
            try:
                response = httpx.post(url, json=payload, headers=headers, timeout=self.timeout_s)
            except httpx.TimeoutException as exc:
                last_failure = Timeout(f"provider timed out: {exc}")
                continue
            except httpx.HTTPError as exc:
                last_failure = ProviderError(f"transport failure: {exc}")
                continue
            if response.status_code == 200:
                return self._parse(response, model, started)
            if response.status_code == 429:
                last_failure = RateLimited("provider rate limit (429)")
                continue
            if 500 <= response.status_code < 600:
                last_failure = ProviderError(f"provider returned {response.status_code}")
                continue
            raise ProviderError(f"provider returned {response.status_code}")
        raise last_failure

    def _backoff_seconds(self, retry_index: int) -> float:
        delay_ms = self.backoff_base_ms * (self.backoff_factor**retry_index)
        delay_ms *= 1 + self._rng.uniform(-self.jitter, self.jitter)
        return delay_ms / 1000.0

    def _parse(self, response: httpx.Response, model: ModelConfig, started: float) -> Completion:
        latency_ms = int((time.monotonic() - started) * 1000)
        try:
            body = response.json()
            choices = body["choices"]
            text = choices[0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise ProviderError(f"malformed completion payload: {exc}") from exc
        if not text:
            raise EmptyCompletion("provider returned an empty completion")
        usage = body.get("usage") or {}
        return Completion(
            text=text,
            model_id=body.get("model", model.model_id),
            input_tokens=int(usage.get("prompt_tokens", 0)),
            output_tokens=int(usage.get("completion_tokens", 0)),
            latency_ms=latency_ms,
        )
