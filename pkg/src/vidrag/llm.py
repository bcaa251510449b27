"""Chat-completion gateway.

One contract serves question generation, answering, judging, summarization
and routing: complete(request, provider) -> text. The remote provider speaks
the common chat-completions JSON shape; the scripted provider replays a
fixture file so full pipeline runs are deterministic and offline.

The gateway never truncates prompts. Requests over the provider's context
budget fail with PromptTooLong; callers decide what to cut.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import httpx

from .embedding import RetryPolicy, request_with_retries
from .errors import BadJudgeOutput, FixtureMiss, PromptTooLong, ProviderError
from .hashutil import prompt_key

__all__ = [
    "ResponseFormat",
    "LlmRequest",
    "LlmProviderSpec",
    "LlmProvider",
    "ScriptedLlmProvider",
    "RemoteChatProvider",
    "make_llm_provider",
    "complete",
    "ask_strict_json",
]

DEFAULT_CONTEXT_BUDGET = 48_000  # characters


class ResponseFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


@dataclass(frozen=True)
class LlmRequest:
    system_prompt: str
    user_prompt: str
    temperature: float = 0.0
    max_tokens: int = 1024
    response_format: ResponseFormat = ResponseFormat.TEXT

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not self.system_prompt or not self.user_prompt:
            raise ValueError("prompts must be non-empty")


@dataclass(frozen=True)
class LlmProviderSpec:
    kind: str  # "remote_chat" | "scripted"
    model_name: str = "scripted"
    endpoint: str = ""
    api_key_env: str = "VIDRAG_LLM_API_KEY"
    fixture_path: str = ""
    context_budget: int = DEFAULT_CONTEXT_BUDGET

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "model_name": self.model_name,
            "endpoint": self.endpoint,
            "fixture_path": self.fixture_path,
            "context_budget": self.context_budget,
        }


class LlmProvider:
    spec: LlmProviderSpec

    @property
    def context_budget(self) -> int:
        return self.spec.context_budget

    def complete(self, request: LlmRequest) -> str:
        if len(request.system_prompt) + len(request.user_prompt) > self.context_budget:
            raise PromptTooLong(
                f"prompt of {len(request.system_prompt) + len(request.user_prompt)} chars "
                f"exceeds context budget {self.context_budget}"
            )
        return self._complete(request)

    def _complete(self, request: LlmRequest) -> str:
        raise NotImplementedError


class ScriptedLlmProvider(LlmProvider):
    """Fixture-backed provider for deterministic offline runs.

    The fixture is JSON lines of {"key": <16-hex hash or null>, "response": text}.
    Keyed entries answer any request whose (system, user) prompt hash matches;
    null-keyed entries form an ordered playback queue consumed by requests
    with no keyed match. Responses are returned verbatim.
    """

    def __init__(self, fixture_path: str | Path, context_budget: int = DEFAULT_CONTEXT_BUDGET):
        path = Path(fixture_path)
        if not path.exists():
            raise ProviderError(f"scripted fixture not found: {path}")
        self.spec = LlmProviderSpec(
            kind="scripted",
            model_name="scripted",
            fixture_path=str(path),
            context_budget=context_budget,
        )
        self._by_key: dict[str, str] = {}
        self._queue: list[str] = []
        self._lock = threading.Lock()
        for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                response = entry["response"]
                key = entry["key"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ProviderError(f"bad fixture line {line_no} in {path}: {exc}") from exc
            if key is None:
                self._queue.append(response)
            else:
                self._by_key[str(key)] = response

    def _complete(self, request: LlmRequest) -> str:
        key = prompt_key(request.system_prompt, request.user_prompt)
        hit = self._by_key.get(key)
        if hit is not None:
            return hit
        with self._lock:
            if self._queue:
                return self._queue.pop(0)
        raise FixtureMiss(
            f"no fixture entry for prompt key {key} and playback queue is empty"
        )


class RemoteChatProvider(LlmProvider):
    """JSON-over-HTTP chat-completions endpoint.

    Request {model, messages, temperature, max_tokens, response_format?};
    the reply text is choices[0].message.content. Transport failures and
    retryable statuses follow the shared retry policy; a JSON-format request
    that comes back as non-JSON is re-asked once, then fails hard rather
    than salvaging a parse.
    """

    def __init__(
        self,
        spec: LlmProviderSpec,
        api_key: str,
        retry: RetryPolicy | None = None,
        transport: httpx.BaseTransport | None = None,
        sleep=time.sleep,
    ):
        if not spec.endpoint:
            raise ProviderError("remote chat provider requires an endpoint")
        self.spec = spec
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._retry = retry or RetryPolicy()
        self._client = httpx.Client(transport=transport, timeout=60.0)
        self._sleep = sleep

    def _payload(self, request: LlmRequest) -> dict:
        payload = {
            "model": self.spec.model_name,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if request.response_format is ResponseFormat.JSON:
            payload["response_format"] = {"type": "json_object"}
        return payload

    def _ask_once(self, request: LlmRequest) -> str:
        response = request_with_retries(
            self._client,
            self.spec.endpoint,
            self._payload(request),
            self._headers,
            self._retry,
            sleep=self._sleep,
        )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed chat response: {exc}") from exc

    def _complete(self, request: LlmRequest) -> str:
        text = self._ask_once(request)
        if request.response_format is ResponseFormat.JSON:
            try:
                json.loads(text)
            except json.JSONDecodeError:
                text = self._ask_once(request)  # one re-ask, identical request
                try:
                    json.loads(text)
                except json.JSONDecodeError as exc:
                    raise ProviderError(
                        f"BadFormat: provider returned non-JSON twice: {text[:200]!r}"
                    ) from exc
        return text


def complete(request: LlmRequest, provider: LlmProvider) -> str:
    return provider.complete(request)


def ask_strict_json(provider: LlmProvider, request: LlmRequest, validate) -> dict:
    """Ask, strict-parse with the caller's validator, re-ask the identical
    request once on unusable output, then raise BadJudgeOutput. No salvage
    parsing: silently repaired output would corrupt downstream metrics."""
    text = ""
    for attempt in range(2):
        text = provider.complete(request)
        try:
            return validate(json.loads(text))
        except (json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
            if attempt == 1:
                raise BadJudgeOutput(
                    f"output unusable after re-ask: {text[:200]!r} ({exc})"
                ) from exc
    raise AssertionError("unreachable")


def make_llm_provider(
    spec: LlmProviderSpec, api_key: str = "", **kwargs
) -> LlmProvider:
    if spec.kind == "scripted":
        return ScriptedLlmProvider(spec.fixture_path, context_budget=spec.context_budget)
    if spec.kind == "remote_chat":
        return RemoteChatProvider(spec, api_key=api_key, **kwargs)
    raise ValueError(f"unknown llm provider kind {spec.kind!r}")
