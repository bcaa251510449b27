"""Automatic retrieval and summarization evaluation.

The retrieval protocol: sample videos, generate general knowledge questions
from their aligned transcripts, retrieve per question over a chosen field
variant, then let a judge model decide HIT@K (does any top-K document
contain the needed information) and rate QUALITY@1 (1-10 score for an
answer generated from the top-1 video). As a control, answers are always
generated from the top-1 video's aligned transcript no matter which field
variant did the retrieving, so answer quality differences reflect retrieval
quality rather than prompt-context differences.

The summarization harness compares summaries generated from each text
variant against the aligned-transcript summary with a pluggable scorer.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .catalog import FieldVariant, VideoDocument, variant_text
from .embedding import EmbeddingProvider, cosine
from .errors import (
    BadJudgeOutput,
    EmptyContext,
    EmptyInput,
    EmptyTranscript,
    InsufficientDepth,
    InsufficientQuestions,
    JudgeFailureBudgetExceeded,
    PromptTooLong,
    ProviderError,
    VidragError,
)
from .index import ChunkingParams, build_index
from .llm import LlmProvider, LlmRequest, ResponseFormat, ask_strict_json
from .prompts import load_prompt, prompt_version_hash
from .transcript import AlignedTranscript, chunk_transcript, render

__all__ = [
    "GeneratedQuestion",
    "JudgeVerdict",
    "QualityScore",
    "EvalConfig",
    "EvalReport",
    "EvalRun",
    "generate_questions",
    "judge_hit",
    "hit_at_k",
    "answer_question",
    "judge_quality",
    "run_retrieval_eval",
    "summarize_video",
    "compare_summaries",
    "token_f1",
    "make_embedding_scorer",
    "run_summary_eval",
    "transcript_context",
    "load_questions",
    "save_questions",
    "render_eval_table",
    "eval_run_as_dict",
    "eval_run_as_csv",
    "VARIANT_LABELS",
]

VARIANT_LABELS = {
    FieldVariant.ASR: "ASR",
    FieldVariant.VISUAL_CAPTIONS: "Visual Captions",
    FieldVariant.TITLE: "Title",
    FieldVariant.TITLE_DESCRIPTION: "Title + Description",
    FieldVariant.ALIGNED_TRANSCRIPT: "Aligned Transcript",
}

SUMMARY_VARIANTS = (
    FieldVariant.ASR,
    FieldVariant.VISUAL_CAPTIONS,
    FieldVariant.TITLE_DESCRIPTION,
    FieldVariant.ALIGNED_TRANSCRIPT,
)


@dataclass(frozen=True)
class GeneratedQuestion:
    question_id: str
    text: str
    source_video_id: str


@dataclass(frozen=True)
class JudgeVerdict:
    question_id: str
    rank: int  # 1-based retrieval rank of the judged document
    contains_answer: bool
    rationale: str


@dataclass(frozen=True)
class QualityScore:
    question_id: str
    score: int  # 1-10
    rationale: str


@dataclass(frozen=True)
class EvalConfig:
    provider: EmbeddingProvider
    variant: FieldVariant


@dataclass
class EvalReport:
    embedding: str
    database: str
    hit_at: dict[int, float]
    quality_at_1: float | None
    n_questions: int
    judged_depth: int
    warnings: list[str] = field(default_factory=list)
    details: list[dict] = field(default_factory=list)


@dataclass
class EvalRun:
    reports: list[EvalReport]
    k_values: tuple[int, ...]
    prompt_version: str
    judge_calls: int
    judge_errors: int


# --- transcript context ------------------------------------------------------

def transcript_context(
    transcript: AlignedTranscript,
    budget_chars: int,
    max_chars: int = 2000,
) -> str:
    """Largest prefix of transcript chunks that fits the character budget.

    Truncation is chunk-at-a-time (chunks built without overlap here), so the
    result is always a prefix of whole rendered lines, never a mid-line cut.
    """
    if not transcript.segments:
        raise EmptyTranscript(f"video {transcript.video_id!r} has no segments")
    rendered = render(transcript)
    if len(rendered) <= budget_chars:
        return rendered
    if budget_chars < 1:
        raise PromptTooLong(f"no room for transcript in a {budget_chars}-char budget")
    chunks = chunk_transcript(
        transcript, max_chars=min(max_chars, budget_chars), overlap_lines=0
    )
    selected: list[str] = []
    total = 0
    for chunk in chunks:
        extra = len(chunk.text) + (1 if selected else 0)
        if total + extra > budget_chars:
            break
        selected.append(chunk.text)
        total += extra
    if not selected:
        raise PromptTooLong(
            f"first transcript line exceeds the {budget_chars}-char budget"
        )
    return "\n".join(selected)


def _user_budget(llm: LlmProvider, system: str, user_without_context: str) -> int:
    return llm.context_budget - len(system) - len(user_without_context)


# --- question generation -----------------------------------------------------

def _parse_string_array(text: str) -> list[str]:
    data = json.loads(text)
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise ValueError("expected a JSON array of strings")
    return [x.strip() for x in data if x.strip()]


def generate_questions(
    catalog: Sequence[VideoDocument],
    n_videos: int,
    n_questions: int,
    llm: LlmProvider,
    seed: int,
    questions_per_video: int = 3,
    chunking: ChunkingParams | None = None,
) -> list[GeneratedQuestion]:
    """Sample videos, pool LLM-generated questions, sample the final set.

    Deterministic given (catalog order, seed) and a scripted provider: both
    sampling steps draw from one seeded RNG.
    """
    if n_videos > len(catalog):
        raise InsufficientQuestions(
            f"cannot sample {n_videos} videos from a catalog of {len(catalog)}"
        )
    chunking = chunking or ChunkingParams()
    rng = random.Random(seed)
    sampled = rng.sample(list(catalog), n_videos)
    template = load_prompt("question_gen")

    pool: list[tuple[str, str]] = []
    for doc in sampled:
        transcript = doc.aligned()
        if not transcript.segments:
            continue
        base = template.render_user(
            title=doc.title, transcript="", count=str(questions_per_video)
        )
        context = transcript_context(
            transcript, _user_budget(llm, template.system, base), chunking.max_chars
        )
        request = LlmRequest(
            system_prompt=template.system,
            user_prompt=template.render_user(
                title=doc.title, transcript=context, count=str(questions_per_video)
            ),
            response_format=ResponseFormat.JSON,
        )
        text = llm.complete(request)
        try:
            questions = _parse_string_array(text)
        except (json.JSONDecodeError, ValueError):
            text = llm.complete(request)  # one re-ask
            try:
                questions = _parse_string_array(text)
            except (json.JSONDecodeError, ValueError) as exc:
                raise ProviderError(
                    f"question generator returned unparseable output for "
                    f"{doc.video_id!r}: {text[:200]!r}"
                ) from exc
        pool.extend((doc.video_id, q) for q in questions)

    if len(pool) < n_questions:
        raise InsufficientQuestions(
            f"question pool has {len(pool)} entries, need {n_questions}"
        )
    chosen = rng.sample(pool, n_questions)
    return [
        GeneratedQuestion(
            question_id=f"q{i:04d}", text=text, source_video_id=video_id
        )
        for i, (video_id, text) in enumerate(chosen, start=1)
    ]


def save_questions(questions: Sequence[GeneratedQuestion], path: str | Path) -> None:
    lines = [
        json.dumps(
            {
                "question_id": q.question_id,
                "text": q.text,
                "source_video_id": q.source_video_id,
            },
            ensure_ascii=False,
        )
        for q in questions
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_questions(path: str | Path) -> list[GeneratedQuestion]:
    questions = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        questions.append(
            GeneratedQuestion(
                question_id=obj["question_id"],
                text=obj["text"],
                source_video_id=obj["source_video_id"],
            )
        )
    return questions


# --- judging -----------------------------------------------------------------

def _validate_hit(data) -> dict:
    if not isinstance(data, dict) or not isinstance(data.get("contains_answer"), bool):
        raise ValueError("expected {'contains_answer': bool, 'rationale': str}")
    return {
        "contains_answer": data["contains_answer"],
        "rationale": str(data.get("rationale", "")),
    }


def _validate_quality(data) -> dict:
    if not isinstance(data, dict):
        raise ValueError("expected a JSON object")
    score = data.get("score")
    if isinstance(score, bool) or not isinstance(score, int) or not 1 <= score <= 10:
        raise ValueError(f"score must be an integer in 1..10, got {score!r}")
    return {"score": score, "rationale": str(data.get("rationale", ""))}


def judge_hit(
    question: GeneratedQuestion,
    document_text: str,
    llm: LlmProvider,
    rank: int = 1,
) -> JudgeVerdict:
    if not question.text.strip() or not document_text.strip():
        raise EmptyInput("judge_hit requires a non-empty question and document")
    template = load_prompt("hit_judge")
    request = LlmRequest(
        system_prompt=template.system,
        user_prompt=template.render_user(question=question.text, document=document_text),
        response_format=ResponseFormat.JSON,
    )
    data = ask_strict_json(llm, request, _validate_hit)
    return JudgeVerdict(
        question_id=question.question_id,
        rank=rank,
        contains_answer=data["contains_answer"],
        rationale=data["rationale"],
    )


def judge_quality(
    question: GeneratedQuestion,
    answer: str,
    reference_context: str,
    llm: LlmProvider,
) -> QualityScore:
    if not answer.strip() or not reference_context.strip():
        raise EmptyInput("judge_quality requires a non-empty answer and context")
    template = load_prompt("quality_judge")
    request = LlmRequest(
        system_prompt=template.system,
        user_prompt=template.render_user(
            question=question.text, answer=answer, context=reference_context
        ),
        response_format=ResponseFormat.JSON,
    )
    data = ask_strict_json(llm, request, _validate_quality)
    return QualityScore(
        question_id=question.question_id,
        score=data["score"],
        rationale=data["rationale"],
    )


def hit_at_k(verdicts: dict[str, list[JudgeVerdict]], k: int) -> float:
    """Fraction of questions whose top-k verdicts contain at least one hit."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not verdicts:
        raise ValueError("no verdicts to aggregate")
    hits = 0
    for question_id, ordered in verdicts.items():
        if len(ordered) < k:
            raise InsufficientDepth(
                f"question {question_id!r} judged to depth {len(ordered)} < k={k}"
            )
        if any(v.contains_answer for v in ordered[:k]):
            hits += 1
    return hits / len(verdicts)


# --- answering ---------------------------------------------------------------

def answer_question(
    question: GeneratedQuestion,
    top1_video: VideoDocument,
    llm: LlmProvider,
    chunking: ChunkingParams | None = None,
) -> str:
    """Answer from the top-1 video's aligned transcript (always the aligned
    transcript, regardless of the field variant that retrieved the video)."""
    chunking = chunking or ChunkingParams()
    transcript = top1_video.aligned()
    if not transcript.segments:
        raise EmptyTranscript(f"video {top1_video.video_id!r} has an empty transcript")
    template = load_prompt("answer")
    base = template.render_user(question=question.text, transcript="")
    context = transcript_context(
        transcript, _user_budget(llm, template.system, base), chunking.max_chars
    )
    request = LlmRequest(
        system_prompt=template.system,
        user_prompt=template.render_user(question=question.text, transcript=context),
    )
    return llm.complete(request)


# --- the experiment loop -----------------------------------------------------

def _entry_texts(
    catalog: Sequence[VideoDocument],
    variant: FieldVariant,
    chunking: ChunkingParams,
) -> dict[str, str]:
    """entry_id -> embedded text, mirroring build_index's entry layout."""
    texts: dict[str, str] = {}
    for doc in catalog:
        text = variant_text(doc, variant)
        if not text.strip():
            continue
        if variant is FieldVariant.ALIGNED_TRANSCRIPT:
            for chunk in chunk_transcript(
                doc.aligned(), chunking.max_chars, chunking.overlap_lines
            ):
                texts[f"{doc.video_id}#{chunk.chunk_index}"] = chunk.text
        else:
            texts[doc.video_id] = text
    return texts


def run_retrieval_eval(
    catalog: Sequence[VideoDocument],
    questions: Sequence[GeneratedQuestion],
    configs: Sequence[EvalConfig],
    judge_llm: LlmProvider,
    answer_llm: LlmProvider,
    k_max: int = 10,
    k_values: tuple[int, ...] = (1, 5, 10),
    chunking: ChunkingParams | None = None,
    failure_budget: float = 0.02,
) -> EvalRun:
    """Per config: embed questions, retrieve top k_max (dedup by video),
    judge every rank, aggregate HIT@K and QUALITY@1.

    A corpus shallower than k_max clips the curve and records a warning
    instead of failing, so desk-scale corpora still produce the full report
    shape. If more than failure_budget of judge calls error, the whole run
    fails rather than quietly reporting biased numbers.
    """
    if not questions:
        raise ValueError("no questions to evaluate")
    chunking = chunking or ChunkingParams()
    docs_by_id = {doc.video_id: doc for doc in catalog}
    ordered_questions = sorted(questions, key=lambda q: q.question_id)

    judge_calls = 0
    judge_errors = 0
    reports: list[EvalReport] = []

    for config in configs:
        index = build_index(catalog, config.variant, config.provider, chunking)
        texts = _entry_texts(catalog, config.variant, chunking)
        query_vectors = config.provider.embed_batch([q.text for q in ordered_questions])

        verdicts: dict[str, list[JudgeVerdict]] = {}
        details: list[dict] = []
        quality_scores: list[int] = []
        depth = len(index)

        for question, qvec in zip(ordered_questions, query_vectors):
            results = index.search(qvec, k=k_max, dedup_by_video=True)
            depth = min(depth, len(results))
            row_verdicts: list[JudgeVerdict] = []
            for result in results:
                judge_calls += 1
                try:
                    verdict = judge_hit(
                        question, texts[result.entry_id], judge_llm, rank=result.rank
                    )
                except (BadJudgeOutput, ProviderError, VidragError) as exc:
                    judge_errors += 1
                    verdict = JudgeVerdict(
                        question_id=question.question_id,
                        rank=result.rank,
                        contains_answer=False,
                        rationale=f"judge error: {exc}",
                    )
                row_verdicts.append(verdict)
            verdicts[question.question_id] = row_verdicts

            top1 = docs_by_id[results[0].video_id]
            quality: int | None = None
            judge_calls += 1
            try:
                answer = answer_question(question, top1, answer_llm, chunking)
                reference = transcript_context(
                    top1.aligned(), judge_llm.context_budget // 2, chunking.max_chars
                )
                quality = judge_quality(question, answer, reference, judge_llm).score
                quality_scores.append(quality)
            except (BadJudgeOutput, ProviderError, VidragError):
                judge_errors += 1

            first_hit = next(
                (v.rank for v in row_verdicts if v.contains_answer), None
            )
            details.append(
                {
                    "question_id": question.question_id,
                    "question": question.text,
                    "source_video_id": question.source_video_id,
                    "retrieved": [
                        {
                            "rank": r.rank,
                            "video_id": r.video_id,
                            "entry_id": r.entry_id,
                            "score": round(r.score, 6),
                        }
                        for r in results
                    ],
                    "first_hit_rank": first_hit,
                    "quality": quality,
                }
            )

        warnings: list[str] = []
        hit_curve: dict[int, float] = {}
        for k in k_values:
            effective_k = min(k, depth)
            if effective_k < k:
                warnings.append(
                    f"HIT@{k} computed over depth {effective_k} (corpus has only "
                    f"{depth} retrievable videos)"
                )
            hit_curve[k] = hit_at_k(verdicts, effective_k)

        reports.append(
            EvalReport(
                embedding=config.provider.spec.model_name,
                database=VARIANT_LABELS[config.variant],
                hit_at=hit_curve,
                quality_at_1=(
                    sum(quality_scores) / len(quality_scores) if quality_scores else None
                ),
                n_questions=len(ordered_questions),
                judged_depth=depth,
                warnings=warnings,
                details=details,
            )
        )

    if judge_calls and judge_errors / judge_calls > failure_budget:
        raise JudgeFailureBudgetExceeded(
            f"{judge_errors}/{judge_calls} judge calls failed "
            f"({judge_errors / judge_calls:.1%} > {failure_budget:.0%} budget)"
        )
    return EvalRun(
        reports=reports,
        k_values=tuple(k_values),
        prompt_version=prompt_version_hash(),
        judge_calls=judge_calls,
        judge_errors=judge_errors,
    )


# --- summarization harness ---------------------------------------------------

def summarize_video(
    video: VideoDocument,
    context_variant: FieldVariant,
    llm: LlmProvider,
) -> str:
    """Summarize from exactly one context variant (aligned transcript verbatim)."""
    if context_variant not in SUMMARY_VARIANTS:
        raise ValueError(f"unsupported summary variant {context_variant!r}")
    context = variant_text(video, context_variant)
    if not context.strip():
        raise EmptyContext(
            f"video {video.video_id!r} has no {context_variant.value} text"
        )
    template = load_prompt("summarize")
    request = LlmRequest(
        system_prompt=template.system,
        user_prompt=template.render_user(
            kind=VARIANT_LABELS[context_variant], context=context
        ),
    )
    return llm.complete(request)


def token_f1(candidate: str, reference: str) -> float:
    """Bag-of-words F1 overlap; 1.0 for identical token multisets."""
    cand = candidate.lower().split()
    ref = reference.lower().split()
    if not cand or not ref:
        raise EmptyInput("token_f1 requires non-empty texts")
    counts: dict[str, int] = {}
    for token in ref:
        counts[token] = counts.get(token, 0) + 1
    overlap = 0
    for token in cand:
        if counts.get(token, 0) > 0:
            counts[token] -= 1
            overlap += 1
    if overlap == 0:
        return 0.0
    precision = overlap / len(cand)
    recall = overlap / len(ref)
    return 2 * precision * recall / (precision + recall)


def make_embedding_scorer(provider: EmbeddingProvider) -> Callable[[str, str], float]:
    """Similarity scorer: cosine of the two embeddings, clamped to [0, 1]."""

    def scorer(candidate: str, reference: str) -> float:
        a, b = provider.embed_batch([candidate, reference])
        return max(0.0, cosine(a, b))

    return scorer


def compare_summaries(
    candidate: str, reference: str, scorer: Callable[[str, str], float]
) -> float:
    if not candidate.strip() or not reference.strip():
        raise EmptyInput("compare_summaries requires non-empty texts")
    return scorer(candidate, reference)


def run_summary_eval(
    catalog: Sequence[VideoDocument],
    llm: LlmProvider,
    scorer: Callable[[str, str], float],
    variants: Sequence[FieldVariant] = (
        FieldVariant.ASR,
        FieldVariant.VISUAL_CAPTIONS,
        FieldVariant.TITLE_DESCRIPTION,
    ),
    reference_variant: FieldVariant = FieldVariant.ALIGNED_TRANSCRIPT,
) -> list[dict]:
    """Mean similarity of each variant's summaries to the reference-variant
    summary; videos missing a variant's text are skipped for that row."""
    references: dict[str, str] = {}
    for doc in catalog:
        if variant_text(doc, reference_variant).strip():
            references[doc.video_id] = summarize_video(doc, reference_variant, llm)

    rows: list[dict] = []
    for variant in variants:
        scores: list[float] = []
        skipped = 0
        for doc in catalog:
            if doc.video_id not in references:
                skipped += 1
                continue
            if not variant_text(doc, variant).strip():
                skipped += 1
                continue
            candidate = summarize_video(doc, variant, llm)
            scores.append(compare_summaries(candidate, references[doc.video_id], scorer))
        rows.append(
            {
                "llm": llm.spec.model_name,
                "prompt_context": VARIANT_LABELS[variant],
                "score": sum(scores) / len(scores) if scores else None,
                "n_videos": len(scores),
                "skipped": skipped,
            }
        )
    return rows


# --- report rendering --------------------------------------------------------

def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.3f}"


def render_eval_table(run: EvalRun) -> str:
    header = ["EMBEDDING", "DATABASE"] + [f"HIT@{k}" for k in run.k_values] + ["QUALITY@1"]
    rows = [
        [r.embedding, r.database]
        + [_fmt(r.hit_at.get(k)) for k in run.k_values]
        + [_fmt(r.quality_at_1)]
        for r in run.reports
    ]
    widths = [
        max(len(header[i]), *(len(row[i]) for row in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]
    lines = [
        "  ".join(header[i].ljust(widths[i]) for i in range(len(header))).rstrip(),
        "  ".join("-" * widths[i] for i in range(len(header))),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(header))).rstrip())
    warnings = [w for r in run.reports for w in r.warnings]
    if warnings:
        lines.append("")
        for warning in dict.fromkeys(warnings):
            lines.append(f"warning: {warning}")
    lines.append("")
    lines.append(f"prompt version: {run.prompt_version}")
    return "\n".join(lines)


def eval_run_as_dict(run: EvalRun) -> dict:
    return {
        "prompt_version": run.prompt_version,
        "k_values": list(run.k_values),
        "judge_calls": run.judge_calls,
        "judge_errors": run.judge_errors,
        "reports": [
            {
                "embedding": r.embedding,
                "database": r.database,
                "hit_at": {str(k): v for k, v in r.hit_at.items()},
                "quality_at_1": r.quality_at_1,
                "n_questions": r.n_questions,
                "judged_depth": r.judged_depth,
                "warnings": r.warnings,
                "details": r.details,
            }
            for r in run.reports
        ],
    }


def eval_run_as_csv(run: EvalRun) -> str:
    header = ["embedding", "database"] + [f"hit@{k}" for k in run.k_values] + ["quality@1"]
    lines = [",".join(header)]
    for r in run.reports:
        cells = [r.embedding, r.database]
        cells += [_fmt(r.hit_at.get(k)) for k in run.k_values]
        cells.append(_fmt(r.quality_at_1))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
