"""Query -> route -> retrieve -> typed cited answer, served over HTTP.

The pipeline mirrors the three application steps: a router picks one
retriever tool (an LLM choice with a deterministic embedding fallback), the
tool's catalog subset is searched for chunked transcript blobs, and a
synthesis model turns the retrieved, timestamped excerpts into a typed JSON
payload. Citations are re-validated against what was actually retrieved;
the service never trusts model-invented timestamps or source references.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum

from .catalog import FieldVariant, VideoDocument
from .embedding import EmbeddingProvider, cosine
from .errors import BadJudgeOutput, EmptyIndex, FixtureMiss, NoTools
from .index import ChunkingParams, RetrievalResult, VectorIndex, build_index
from .llm import LlmProvider, LlmRequest, ResponseFormat, ask_strict_json
from .prompts import load_prompt
from .transcript import TimeSpan, chunk_transcript, format_timestamp

__all__ = [
    "RetrieverTool",
    "AnswerType",
    "Citation",
    "AnswerPayload",
    "QueryResult",
    "RagEngine",
    "select_tool",
    "deep_link",
]

NO_RESULTS_TEXT = "no supporting video found"
_QUOTE_EXCERPT_CHARS = 240


@dataclass(frozen=True)
class RetrieverTool:
    """A named retrieval scope over a subset of the catalog."""

    tool_id: str
    description: str
    video_ids: frozenset[str]

    def __post_init__(self):
        if not self.video_ids:
            raise ValueError(f"tool {self.tool_id!r} has an empty video filter")


class AnswerType(str, Enum):
    HOW_TO = "how_to"
    PLACE = "place"
    GENERAL = "general"


@dataclass(frozen=True)
class Citation:
    video_id: str
    title: str
    time_span: TimeSpan
    deep_link_url: str
    quoted_text: str


@dataclass(frozen=True)
class AnswerPayload:
    answer_type: AnswerType
    content: dict
    citations: tuple[Citation, ...]


@dataclass(frozen=True)
class QueryResult:
    payload: AnswerPayload
    tool_id: str
    retrieved: tuple[RetrievalResult, ...]


def deep_link(url: str, start_ms: int, template: str = "{url}{sep}t={seconds}s") -> str:
    """Watch URL plus a start-time parameter at floor(start_ms / 1000)."""
    if not url:
        return ""
    sep = "&" if "?" in url else "?"
    return template.format(url=url, sep=sep, seconds=start_ms // 1000)


def select_tool(
    query: str,
    tools: list[RetrieverTool],
    llm: LlmProvider | None,
    embedder: EmbeddingProvider | None = None,
) -> str:
    """Pick one tool for a query.

    With an LLM: strict-JSON router choice (one re-ask). Without one, or
    when the router output is unusable, the deterministic fallback embeds
    the query against each tool description and takes the best cosine,
    ties by ascending tool_id.
    """
    if not tools:
        raise NoTools("no retriever tools registered")
    if len(tools) == 1:
        return tools[0].tool_id
    valid_ids = {tool.tool_id for tool in tools}

    if llm is not None:
        template = load_prompt("router")
        listing = "\n".join(f"- {t.tool_id}: {t.description}" for t in tools)
        request = LlmRequest(
            system_prompt=template.system,
            user_prompt=template.render_user(query=query, tools=listing),
            response_format=ResponseFormat.JSON,
        )

        def validate(data) -> dict:
            if not isinstance(data, dict) or data.get("tool") not in valid_ids:
                raise ValueError(f"router must name one of {sorted(valid_ids)}")
            return data

        try:
            return ask_strict_json(llm, request, validate)["tool"]
        except (BadJudgeOutput, FixtureMiss):
            pass  # fall through to deterministic routing

    if embedder is None:
        raise NoTools("routing fallback requires an embedding provider")
    query_vec = embedder.embed_one(query)
    scored = [
        (-cosine(query_vec, embedder.embed_one(tool.description)), tool.tool_id)
        for tool in tools
    ]
    return min(scored)[1]


def _validate_payload_content(answer_type: AnswerType, data: dict) -> dict:
    if answer_type is AnswerType.HOW_TO:
        title = data.get("title")
        steps = data.get("steps")
        if (
            not isinstance(title, str)
            or not title.strip()
            or not isinstance(steps, list)
            or not steps
            or not all(isinstance(s, str) and s.strip() for s in steps)
        ):
            raise ValueError("how_to payload needs a title and >= 1 non-empty step")
        return {"title": title, "steps": list(steps)}
    if answer_type is AnswerType.PLACE:
        fields = {}
        for key in ("name", "description", "why_notable"):
            value = data.get(key)
            if not isinstance(value, str) or not value.strip():
                raise ValueError(f"place payload needs a non-empty {key!r}")
            fields[key] = value
        return fields
    answer = data.get("answer")
    if not isinstance(answer, str) or not answer.strip():
        raise ValueError("general payload needs a non-empty answer")
    return {"answer": answer}


class RagEngine:
    """Immutable pipeline state shared across concurrent requests."""

    def __init__(
        self,
        catalog: list[VideoDocument],
        index: VectorIndex,
        tools: list[RetrieverTool],
        embedder: EmbeddingProvider,
        router_llm: LlmProvider | None,
        synthesis_llm: LlmProvider,
        k_default: int = 5,
        chunking: ChunkingParams | None = None,
        deep_link_template: str = "{url}{sep}t={seconds}s",
    ):
        self.docs = {doc.video_id: doc for doc in catalog}
        self.index = index
        self.tools = list(tools)
        self.embedder = embedder
        self.router_llm = router_llm
        self.synthesis_llm = synthesis_llm
        self.k_default = k_default
        self.chunking = chunking or ChunkingParams()
        self.deep_link_template = deep_link_template
        # chunk texts for the indexed variant, keyed like index entry ids
        self._entry_texts: dict[str, str] = {}
        for doc in catalog:
            for chunk in chunk_transcript(
                doc.aligned(), self.chunking.max_chars, self.chunking.overlap_lines
            ):
                self._entry_texts[f"{doc.video_id}#{chunk.chunk_index}"] = chunk.text
            self._entry_texts.setdefault(doc.video_id, "")  # unchunked entry ids

    @classmethod
    def build(
        cls,
        catalog: list[VideoDocument],
        embedder: EmbeddingProvider,
        synthesis_llm: LlmProvider,
        router_llm: LlmProvider | None = None,
        tools: list[RetrieverTool] | None = None,
        chunking: ChunkingParams | None = None,
        k_default: int = 5,
    ) -> "RagEngine":
        """Build an engine over a chunked aligned-transcript index."""
        chunking = chunking or ChunkingParams()
        index = build_index(catalog, FieldVariant.ALIGNED_TRANSCRIPT, embedder, chunking)
        if tools is None:
            tools = [
                RetrieverTool(
                    tool_id="all",
                    description="the full video catalog",
                    video_ids=frozenset(doc.video_id for doc in catalog),
                )
            ]
        return cls(
            catalog,
            index,
            tools,
            embedder,
            router_llm,
            synthesis_llm,
            k_default=k_default,
            chunking=chunking,
        )

    def tool_by_id(self, tool_id: str) -> RetrieverTool | None:
        return next((t for t in self.tools if t.tool_id == tool_id), None)

    def entry_text(self, result: RetrievalResult) -> str:
        text = self._entry_texts.get(result.entry_id, "")
        if not text:
            doc = self.docs.get(result.video_id)
            text = "\n".join(
                chunk.text
                for chunk in chunk_transcript(
                    doc.aligned(), self.chunking.max_chars, 0
                )
            ) if doc else ""
        return text

    def _no_results(self, query: str) -> AnswerPayload:
        return AnswerPayload(
            answer_type=AnswerType.GENERAL,
            content={"answer": f"{NO_RESULTS_TEXT} for: {query}"},
            citations=(),
        )

    def _sources_block(self, results: tuple[RetrievalResult, ...]) -> str:
        blocks = []
        for i, result in enumerate(results, start=1):
            doc = self.docs[result.video_id]
            span = result.time_span
            blocks.append(
                f"[S{i}] video: {doc.title or result.video_id} "
                f"({format_timestamp(span.start_ms)} --> {format_timestamp(span.end_ms)})\n"
                f"{self.entry_text(result)}"
            )
        return "\n\n".join(blocks)

    def _citation_for(
        self, result: RetrievalResult, quote: str | None
    ) -> Citation:
        doc = self.docs[result.video_id]
        chunk_text = self.entry_text(result)
        if quote and quote in chunk_text:
            excerpt = quote
        else:
            excerpt = chunk_text[:_QUOTE_EXCERPT_CHARS]
        return Citation(
            video_id=result.video_id,
            title=doc.title,
            time_span=result.time_span,
            deep_link_url=deep_link(
                doc.url, result.time_span.start_ms, self.deep_link_template
            ),
            quoted_text=excerpt,
        )

    def _fallback_payload(
        self, raw_text: str, results: tuple[RetrievalResult, ...]
    ) -> AnswerPayload:
        """GENERAL wrapper when synthesis output cannot be used as typed JSON.

        Attribution is conservative: every retrieved chunk becomes a citation.
        """
        citations = tuple(self._citation_for(r, None) for r in results)
        return AnswerPayload(
            answer_type=AnswerType.GENERAL,
            content={"answer": raw_text.strip()},
            citations=citations,
        )

    def _extractive_answer(self, results: tuple[RetrievalResult, ...]) -> str:
        top = results[0]
        doc = self.docs[top.video_id]
        first_line = self.entry_text(top).split("\n", 1)[0]
        line_text = re.sub(r"^\[[^\]]*\]\s*(?:VISUAL|SPEECH):\s*", "", first_line)
        return (
            f"The most relevant video is \"{doc.title or top.video_id}\" "
            f"(around {format_timestamp(top.time_span.start_ms)}): {line_text}"
        )

    def answer_query(
        self, query: str, k: int | None = None, tool_id: str | None = None
    ) -> QueryResult:
        if not self.tools:
            raise NoTools("no retriever tools registered")
        if tool_id is None:
            tool_id = select_tool(query, self.tools, self.router_llm, self.embedder)
        tool = self.tool_by_id(tool_id)
        if tool is None:
            raise ValueError(f"unknown tool {tool_id!r}")
        k = k or self.k_default

        query_vec = self.embedder.embed_one(query)
        try:
            results = tuple(
                self.index.search(
                    query_vec, k=k, dedup_by_video=True, video_filter=set(tool.video_ids)
                )
            )
        except EmptyIndex:
            results = ()
        if not results:
            return QueryResult(
                payload=self._no_results(query), tool_id=tool_id, retrieved=()
            )

        template = load_prompt("synthesis")
        request = LlmRequest(
            system_prompt=template.system,
            user_prompt=template.render_user(
                query=query, sources=self._sources_block(results)
            ),
            response_format=ResponseFormat.JSON,
            max_tokens=2048,
        )

        def validate(data) -> dict:
            if not isinstance(data, dict):
                raise ValueError("synthesis output must be a JSON object")
            answer_type = AnswerType(data.get("answer_type"))
            content = _validate_payload_content(answer_type, data)
            raw_citations = data.get("citations")
            if not isinstance(raw_citations, list):
                raise ValueError("synthesis output needs a citations array")
            return {"answer_type": answer_type, "content": content, "citations": raw_citations}

        raw_text = ""
        try:
            raw_text = self.synthesis_llm.complete(request)
            parsed = ask_strict_json(_Replay(raw_text, self.synthesis_llm), request, validate)
        except FixtureMiss:
            return QueryResult(
                payload=self._fallback_payload(self._extractive_answer(results), results),
                tool_id=tool_id,
                retrieved=results,
            )
        except BadJudgeOutput:
            return QueryResult(
                payload=self._fallback_payload(raw_text, results),
                tool_id=tool_id,
                retrieved=results,
            )

        citations: list[Citation] = []
        cited_sources: set[int] = set()
        for item in parsed["citations"]:
            if not isinstance(item, dict):
                continue
            source = item.get("source")
            if not isinstance(source, int) or not 1 <= source <= len(results):
                continue  # hallucinated source reference: drop
            if source in cited_sources:
                continue
            cited_sources.add(source)
            quote = item.get("quote") if isinstance(item.get("quote"), str) else None
            citations.append(self._citation_for(results[source - 1], quote))

        if not citations:
            # every model citation was invalid: degrade to no-results semantics
            return QueryResult(
                payload=self._no_results(query), tool_id=tool_id, retrieved=results
            )
        return QueryResult(
            payload=AnswerPayload(
                answer_type=parsed["answer_type"],
                content=parsed["content"],
                citations=tuple(citations),
            ),
            tool_id=tool_id,
            retrieved=results,
        )


class _Replay(LlmProvider):
    """Feeds an already-fetched response through the strict-parse helper so
    the first parse attempt reuses it and only the re-ask hits the provider."""

    def __init__(self, first_text: str, inner: LlmProvider):
        self.spec = inner.spec
        self._first = first_text
        self._inner = inner
        self._used = False

    def _complete(self, request: LlmRequest) -> str:
        if not self._used:
            self._used = True
            return self._first
        return self._inner.complete(request)


def payload_as_dict(result: QueryResult) -> dict:
    """Wire shape for POST /v1/query responses."""
    return {
        "answer_type": result.payload.answer_type.value,
        "tool": result.tool_id,
        "payload": result.payload.content,
        "citations": [
            {
                "video_id": c.video_id,
                "title": c.title,
                "start_ms": c.time_span.start_ms,
                "end_ms": c.time_span.end_ms,
                "deep_link_url": c.deep_link_url,
                "quoted_text": c.quoted_text,
            }
            for c in result.payload.citations
        ],
        "retrieved": [
            {
                "video_id": r.video_id,
                "score": round(r.score, 6),
                "entry_id": r.entry_id,
            }
            for r in result.retrieved
        ],
    }
