import json

import httpx
import pytest

from vidrag.errors import BadJudgeOutput, FixtureMiss, PromptTooLong, ProviderError
from vidrag.hashutil import prompt_key
from vidrag.llm import (
    LlmProviderSpec,
    LlmRequest,
    RemoteChatProvider,
    ResponseFormat,
    ScriptedLlmProvider,
    ask_strict_json,
)
from vidrag.embedding import RetryPolicy


def _fixture(tmp_path, entries):
    path = tmp_path / "fixture.jsonl"
    path.write_text(
        "\n".join(json.dumps(e) for e in entries) + "\n", encoding="utf-8"
    )
    return path


def _request(system="sys prompt", user="user prompt", **kw):
    return LlmRequest(system_prompt=system, user_prompt=user, **kw)


# --- scripted provider -----------------------------------------------------------

def test_scripted_keyed_lookup(tmp_path):
    key = prompt_key("sys prompt", "user prompt")
    provider = ScriptedLlmProvider(_fixture(tmp_path, [{"key": key, "response": "4"}]))
    assert provider.complete(_request()) == "4"
    # keyed entries are reusable, not consumed
    assert provider.complete(_request()) == "4"


def test_scripted_playback_order(tmp_path):
    provider = ScriptedLlmProvider(
        _fixture(tmp_path, [
            {"key": None, "response": "first"},
            {"key": None, "response": "second"},
        ])
    )
    assert provider.complete(_request(user="anything")) == "first"
    assert provider.complete(_request(user="else")) == "second"


def test_scripted_fixture_miss(tmp_path):
    provider = ScriptedLlmProvider(_fixture(tmp_path, [{"key": "00" * 8, "response": "x"}]))
    with pytest.raises(FixtureMiss):
        provider.complete(_request(user="unknown"))


def test_scripted_missing_file():
    with pytest.raises(ProviderError):
        ScriptedLlmProvider("/nonexistent/fixture.jsonl")


def test_prompt_too_long_refused(tmp_path):
    provider = ScriptedLlmProvider(
        _fixture(tmp_path, [{"key": None, "response": "y"}]), context_budget=30
    )
    with pytest.raises(PromptTooLong):
        provider.complete(_request(user="u" * 40))


def test_request_validation():
    with pytest.raises(ValueError):
        LlmRequest(system_prompt="", user_prompt="u")
    with pytest.raises(ValueError):
        LlmRequest(system_prompt="s", user_prompt="u", temperature=-0.5)


# --- remote chat provider ----------------------------------------------------------

def _chat_provider(handler):
    spec = LlmProviderSpec(
        kind="remote_chat", model_name="chat-lg", endpoint="https://api.test/v1/chat"
    )
    return RemoteChatProvider(
        spec, api_key="secret", transport=httpx.MockTransport(handler),
        retry=RetryPolicy(attempts=3, backoff_s=0.0), sleep=lambda _s: None,
    )


def _chat_response(text):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def test_remote_chat_happy_path():
    seen = {}

    def handler(request):
        seen.update(json.loads(request.content))
        return _chat_response("hello back")

    provider = _chat_provider(handler)
    out = provider.complete(_request(max_tokens=64))
    assert out == "hello back"
    assert seen["model"] == "chat-lg"
    assert [m["role"] for m in seen["messages"]] == ["system", "user"]
    assert seen["temperature"] == 0.0
    assert "response_format" not in seen


def test_remote_chat_json_format_flag():
    seen = {}

    def handler(request):
        seen.update(json.loads(request.content))
        return _chat_response('{"ok": true}')

    provider = _chat_provider(handler)
    provider.complete(_request(response_format=ResponseFormat.JSON))
    assert seen["response_format"] == {"type": "json_object"}


def test_remote_chat_json_reask_once_then_bad_format():
    calls = []

    def handler(_request):
        calls.append(1)
        return _chat_response("not json at all")

    provider = _chat_provider(handler)
    with pytest.raises(ProviderError, match="BadFormat"):
        provider.complete(_request(response_format=ResponseFormat.JSON))
    assert len(calls) == 2  # one re-ask, then hard error


def test_remote_chat_json_reask_recovers():
    calls = []

    def handler(_request):
        calls.append(1)
        if len(calls) == 1:
            return _chat_response("prose")
        return _chat_response('{"fine": 1}')

    provider = _chat_provider(handler)
    assert provider.complete(_request(response_format=ResponseFormat.JSON)) == '{"fine": 1}'


def test_remote_chat_retries_5xx():
    calls = []

    def handler(_request):
        calls.append(1)
        if len(calls) < 2:
            return httpx.Response(503, text="later")
        return _chat_response("ok")

    assert _chat_provider(handler).complete(_request()) == "ok"


def test_remote_chat_provider_error_after_retries():
    def handler(_request):
        return httpx.Response(500, text="down")

    with pytest.raises(ProviderError):
        _chat_provider(handler).complete(_request())


# --- strict JSON asking --------------------------------------------------------------

def _validator(data):
    if not isinstance(data, dict) or "v" not in data:
        raise ValueError("needs v")
    return data


def test_ask_strict_json_passes_through(tmp_path):
    key = prompt_key("sys prompt", "user prompt")
    provider = ScriptedLlmProvider(
        _fixture(tmp_path, [{"key": key, "response": '{"v": 3}'}])
    )
    assert ask_strict_json(provider, _request(), _validator) == {"v": 3}


def test_ask_strict_json_reask_consumes_playback(tmp_path):
    provider = ScriptedLlmProvider(
        _fixture(tmp_path, [
            {"key": None, "response": "garbled"},
            {"key": None, "response": '{"v": 9}'},
        ])
    )
    assert ask_strict_json(provider, _request(), _validator) == {"v": 9}


def test_ask_strict_json_fails_after_reask(tmp_path):
    key = prompt_key("sys prompt", "user prompt")
    provider = ScriptedLlmProvider(
        _fixture(tmp_path, [{"key": key, "response": "still prose"}])
    )
    with pytest.raises(BadJudgeOutput):
        ask_strict_json(provider, _request(), _validator)
