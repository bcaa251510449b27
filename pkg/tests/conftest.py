from __future__ import annotations

from pathlib import Path

import pytest
import yaml

from vidrag.catalog import load_catalog
from vidrag.embedding import LocalHashProvider
from vidrag.index import ChunkingParams
from vidrag.llm import LlmProvider, LlmRequest, ScriptedLlmProvider
from vidrag.service import RagEngine, RetrieverTool

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


class TraceLlm(LlmProvider):
    """Pass-through wrapper recording every request, for prompt inspection."""

    def __init__(self, inner: LlmProvider):
        self.spec = inner.spec
        self.inner = inner
        self.requests: list[LlmRequest] = []

    def _complete(self, request: LlmRequest) -> str:
        self.requests.append(request)
        return self.inner.complete(request)


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(FIXTURES / "mini.jsonl")


@pytest.fixture(scope="session")
def fixture_config():
    return yaml.safe_load((FIXTURES / "config.yaml").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def chunking(fixture_config):
    raw = fixture_config["chunking"]
    return ChunkingParams(max_chars=raw["max_chars"], overlap_lines=raw["overlap_lines"])


@pytest.fixture()
def scripted_llm():
    return ScriptedLlmProvider(FIXTURES / "llm_fixture.jsonl")


@pytest.fixture()
def hash_provider(fixture_config):
    return LocalHashProvider(dim=fixture_config["embedding"]["dim"])


@pytest.fixture()
def fixture_tools(fixture_config):
    return [
        RetrieverTool(t["tool_id"], t["description"], frozenset(t["video_ids"]))
        for t in fixture_config["tools"]
    ]


@pytest.fixture()
def engine(catalog, hash_provider, scripted_llm, fixture_tools, chunking):
    return RagEngine.build(
        catalog,
        hash_provider,
        synthesis_llm=scripted_llm,
        router_llm=scripted_llm,
        tools=fixture_tools,
        chunking=chunking,
        k_default=5,
    )
