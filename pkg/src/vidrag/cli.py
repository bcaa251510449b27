"""Operator entry point: ingest, align, index, query, evaluate, serve.

Configuration precedence is flags > environment > YAML config file. Secrets
never live in config files: API keys come from VIDRAG_EMBED_API_KEY /
VIDRAG_LLM_API_KEY, and VIDRAG_EMBED_BASE_URL / VIDRAG_LLM_BASE_URL
override configured endpoints.

Exit codes: 0 success, 1 operational error, 2 usage error.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import yaml

from . import __version__
from .catalog import FieldVariant, load_catalog
from .embedding import EmbeddingProvider, EmbeddingProviderSpec, make_embedding_provider
from .errors import VidragError
from .evals import (
    EvalConfig,
    eval_run_as_csv,
    eval_run_as_dict,
    generate_questions,
    load_questions,
    make_embedding_scorer,
    render_eval_table,
    run_retrieval_eval,
    run_summary_eval,
    save_questions,
    token_f1,
)
from .index import ChunkingParams, build_index, load_index, save_index
from .llm import LlmProvider, LlmProviderSpec, make_llm_provider
from .service import RagEngine, RetrieverTool, payload_as_dict
from .stats import corpus_stats, render_stats_table, stats_as_dict
from .transcript import render

ENV_EMBED_KEY = "VIDRAG_EMBED_API_KEY"
ENV_LLM_KEY = "VIDRAG_LLM_API_KEY"
ENV_EMBED_URL = "VIDRAG_EMBED_BASE_URL"
ENV_LLM_URL = "VIDRAG_LLM_BASE_URL"

ALL_VARIANTS = [v.value for v in FieldVariant]


def _load_config(path: str | None) -> dict:
    if path is None:
        default = Path("vidrag.yaml")
        if not default.exists():
            return {}
        path = str(default)
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise VidragError(f"config file {path} must hold a mapping")
    data["_config_dir"] = str(Path(path).resolve().parent)
    return data


def _resolve_path(config: dict, value: str | None) -> str | None:
    """Paths inside a config file resolve relative to that file."""
    if value is None:
        return None
    path = Path(value)
    base = config.get("_config_dir")
    if base and not path.is_absolute():
        return str(Path(base) / path)
    return str(path)


def _embedding_provider(config: dict) -> EmbeddingProvider:
    cfg = config.get("embedding", {}) or {}
    spec = EmbeddingProviderSpec(
        kind=cfg.get("kind", "local_hash"),
        model_name=cfg.get("model_name", "local-hash-v1"),
        dim=int(cfg.get("dim", 256)),
        endpoint=os.environ.get(ENV_EMBED_URL) or cfg.get("endpoint", ""),
        batch_size=int(cfg.get("batch_size", 64)),
    )
    return make_embedding_provider(spec, api_key=os.environ.get(ENV_EMBED_KEY, ""))


def _llm_provider(config: dict, role: str) -> LlmProvider | None:
    cfg = config.get(role) or config.get("llm")
    if not cfg:
        return None
    spec = LlmProviderSpec(
        kind=cfg.get("kind", "scripted"),
        model_name=cfg.get("model_name", "scripted"),
        endpoint=os.environ.get(ENV_LLM_URL) or cfg.get("endpoint", ""),
        fixture_path=_resolve_path(config, cfg.get("fixture")) or "",
        context_budget=int(cfg.get("context_budget", 48_000)),
    )
    return make_llm_provider(spec, api_key=os.environ.get(ENV_LLM_KEY, ""))


def _chunking(config: dict) -> ChunkingParams:
    cfg = config.get("chunking", {}) or {}
    return ChunkingParams(
        max_chars=int(cfg.get("max_chars", 2000)),
        overlap_lines=int(cfg.get("overlap_lines", 2)),
    )


def _tools(config: dict, catalog) -> list[RetrieverTool]:
    all_ids = frozenset(doc.video_id for doc in catalog)
    raw = config.get("tools") or []
    tools = []
    for item in raw:
        ids = item.get("video_ids", "all")
        video_ids = all_ids if ids == "all" else frozenset(ids) & all_ids
        tools.append(
            RetrieverTool(
                tool_id=item["tool_id"],
                description=item.get("description", item["tool_id"]),
                video_ids=video_ids,
            )
        )
    if not tools:
        tools = [RetrieverTool("all", "the full video catalog", all_ids)]
    return tools


def _catalog_path(config: dict, flag: str | None) -> str:
    path = flag or _resolve_path(config, config.get("catalog"))
    if not path:
        raise click.UsageError("no catalog given (use --catalog or a config file)")
    return path


@click.group()
@click.version_option(version=__version__, prog_name="vidrag")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML config file (default: ./vidrag.yaml when present).")
@click.pass_context
def cli(ctx: click.Context, config_path: str | None):
    """Video RAG over aligned video caption transcripts."""
    ctx.obj = _load_config(config_path)


@cli.command()
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--stats", "show_stats", is_flag=True, help="Print corpus statistics.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_obj
def ingest(config: dict, catalog_path: str | None, show_stats: bool, as_json: bool):
    """Validate a catalog file and optionally report corpus statistics."""
    catalog = load_catalog(_catalog_path(config, catalog_path))
    if show_stats:
        stats = corpus_stats(catalog)
        if as_json:
            click.echo(json.dumps(stats_as_dict(stats), indent=2))
        else:
            click.echo(render_stats_table(stats))
    else:
        click.echo(f"catalog OK: {len(catalog)} videos")


@cli.command()
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.pass_obj
def align(config: dict, catalog_path: str | None, out_dir: str):
    """Write canonical .avc.txt transcripts, one file per video."""
    catalog = load_catalog(_catalog_path(config, catalog_path))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for doc in catalog:
        (out / f"{doc.video_id}.avc.txt").write_text(
            render(doc.aligned()) + "\n", encoding="utf-8"
        )
    click.echo(f"wrote {len(catalog)} transcripts to {out}")


@cli.group()
def index():
    """Build or inspect vector indices."""


@index.command("build")
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--variant", type=click.Choice(ALL_VARIANTS), default="aligned_transcript")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.pass_obj
def index_build(config: dict, catalog_path: str | None, variant: str, out_path: str):
    """Embed one field variant of the catalog into a searchable index."""
    catalog = load_catalog(_catalog_path(config, catalog_path))
    provider = _embedding_provider(config)
    idx = build_index(catalog, FieldVariant(variant), provider, _chunking(config))
    save_index(idx, out_path)
    skipped = idx.metadata.get("skipped_video_ids", [])
    click.echo(f"indexed {len(idx)} entries (dim {idx.dim}) -> {out_path}")
    if skipped:
        click.echo(f"skipped {len(skipped)} videos with empty {variant} text: "
                   + ", ".join(skipped))


@index.command("inspect")
@click.argument("path", type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def index_inspect(path: str, as_json: bool):
    """Show an index's dimensions, entry count and build metadata."""
    idx = load_index(path)
    info = {"entries": len(idx), "dim": idx.dim, "metadata": idx.metadata}
    if as_json:
        click.echo(json.dumps(info, indent=2, sort_keys=True))
    else:
        click.echo(f"entries: {len(idx)}")
        click.echo(f"dim: {idx.dim}")
        for key, value in sorted(idx.metadata.items()):
            click.echo(f"{key}: {json.dumps(value, sort_keys=True)}")


def _engine(config: dict, catalog_path: str | None, index_path: str | None) -> RagEngine:
    catalog = load_catalog(_catalog_path(config, catalog_path))
    embedder = _embedding_provider(config)
    synthesis = _llm_provider(config, "llm")
    if synthesis is None:
        raise VidragError("no llm provider configured (config key 'llm')")
    router = _llm_provider(config, "router_llm")
    tools = _tools(config, catalog)
    path = index_path or _resolve_path(config, config.get("index"))
    chunking = _chunking(config)
    if path:
        if not Path(path).exists():
            raise VidragError(f"index not found: {path} (run `vidrag index build`)")
        idx = load_index(path)
        meta_chunking = idx.metadata.get("chunking")
        if meta_chunking:
            chunking = ChunkingParams(
                max_chars=int(meta_chunking.get("max_chars", chunking.max_chars)),
                overlap_lines=int(meta_chunking.get("overlap_lines", chunking.overlap_lines)),
            )
        return RagEngine(
            catalog, idx, tools, embedder, router, synthesis,
            k_default=int(config.get("k", 5)), chunking=chunking,
        )
    return RagEngine.build(
        catalog, embedder, synthesis, router_llm=router, tools=tools,
        chunking=chunking, k_default=int(config.get("k", 5)),
    )


@cli.command()
@click.argument("text")
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--index", "index_path", type=click.Path(), default=None,
              help="Built index file; omit to embed the catalog on the fly.")
@click.option("--k", type=int, default=None)
@click.option("--tool", "tool_id", default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def query(config: dict, text: str, catalog_path: str | None, index_path: str | None,
          k: int | None, tool_id: str | None, as_json: bool):
    """One-shot question answering with citations."""
    engine = _engine(config, catalog_path, index_path)
    result = engine.answer_query(text, k=k, tool_id=tool_id)
    body = payload_as_dict(result)
    if as_json:
        click.echo(json.dumps(body, indent=2, ensure_ascii=False))
        return
    payload = body["payload"]
    if body["answer_type"] == "how_to":
        click.echo(payload["title"])
        for i, step in enumerate(payload["steps"], start=1):
            click.echo(f"  {i}. {step}")
    elif body["answer_type"] == "place":
        click.echo(f"{payload['name']}: {payload['description']}")
        click.echo(f"why notable: {payload['why_notable']}")
    else:
        click.echo(payload["answer"])
    for citation in body["citations"]:
        start_s = citation["start_ms"] // 1000
        label = citation["title"] or citation["video_id"]
        link = f" <{citation['deep_link_url']}>" if citation["deep_link_url"] else ""
        click.echo(f"  [{label} @ {start_s // 60:02d}:{start_s % 60:02d}]{link}")


@cli.command("gen-questions")
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--n-videos", type=int, default=None)
@click.option("--n-questions", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.pass_obj
def gen_questions(config: dict, catalog_path: str | None, n_videos: int | None,
                  n_questions: int | None, seed: int | None, out_path: str):
    """Generate general knowledge questions from sampled video transcripts."""
    catalog = load_catalog(_catalog_path(config, catalog_path))
    llm = _llm_provider(config, "llm")
    if llm is None:
        raise VidragError("no llm provider configured (config key 'llm')")
    n_videos = n_videos if n_videos is not None else min(len(catalog), 500)
    n_questions = n_questions if n_questions is not None else int(config.get("n_questions", 10))
    seed = seed if seed is not None else int(config.get("seed", 7))
    questions = generate_questions(
        catalog, n_videos, n_questions, llm, seed, chunking=_chunking(config)
    )
    save_questions(questions, out_path)
    click.echo(f"wrote {len(questions)} questions to {out_path}")


@cli.group("eval")
def eval_group():
    """Retrieval and summarization evaluation."""


@eval_group.command("retrieval")
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--questions", "questions_path", type=click.Path(), required=True)
@click.option("--variants", default=",".join(ALL_VARIANTS),
              help="Comma-separated field variants to evaluate.")
@click.option("--k-max", type=int, default=None)
@click.option("--out", "out_prefix", type=click.Path(), default=None,
              help="Write <out>.json, <out>.txt and <out>.csv reports.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def eval_retrieval(config: dict, catalog_path: str | None, questions_path: str,
                   variants: str, k_max: int | None, out_prefix: str | None,
                   as_json: bool):
    """Run the HIT@K / QUALITY@1 protocol and emit a results table."""
    catalog = load_catalog(_catalog_path(config, catalog_path))
    questions = load_questions(questions_path)
    judge = _llm_provider(config, "judge_llm")
    answerer = _llm_provider(config, "llm")
    if judge is None or answerer is None:
        raise VidragError("judge and answer llm providers must be configured")
    configs = [
        EvalConfig(provider=_embedding_provider(config), variant=FieldVariant(name))
        for name in variants.split(",") if name
    ]
    run = run_retrieval_eval(
        catalog, questions, configs, judge, answerer,
        k_max=k_max if k_max is not None else int(config.get("k_max", 10)),
        chunking=_chunking(config),
    )
    table = render_eval_table(run)
    as_dict = eval_run_as_dict(run)
    if out_prefix:
        Path(out_prefix + ".json").write_text(
            json.dumps(as_dict, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        Path(out_prefix + ".txt").write_text(table + "\n", encoding="utf-8")
        Path(out_prefix + ".csv").write_text(eval_run_as_csv(run), encoding="utf-8")
    click.echo(json.dumps(as_dict, indent=2, ensure_ascii=False) if as_json else table)


@eval_group.command("summaries")
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--scorer", type=click.Choice(["token_f1", "embedding"]), default="token_f1")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def eval_summaries(config: dict, catalog_path: str | None, scorer: str, as_json: bool):
    """Compare per-variant summaries against the aligned-transcript summary."""
    catalog = load_catalog(_catalog_path(config, catalog_path))
    llm = _llm_provider(config, "llm")
    if llm is None:
        raise VidragError("no llm provider configured (config key 'llm')")
    scorer_fn = token_f1 if scorer == "token_f1" else make_embedding_scorer(
        _embedding_provider(config)
    )
    rows = run_summary_eval(catalog, llm, scorer_fn)
    if as_json:
        click.echo(json.dumps({"scorer": scorer, "rows": rows}, indent=2))
        return
    header = ("LLM", "PROMPT CONTEXT", "SCORE")
    cells = [
        (row["llm"], row["prompt_context"],
         "-" if row["score"] is None else f"{row['score']:.3f}")
        for row in rows
    ]
    widths = [max(len(header[i]), *(len(c[i]) for c in cells)) for i in range(3)]
    click.echo("  ".join(header[i].ljust(widths[i]) for i in range(3)).rstrip())
    click.echo("  ".join("-" * widths[i] for i in range(3)))
    for row in cells:
        click.echo("  ".join(row[i].ljust(widths[i]) for i in range(3)).rstrip())


@cli.command()
@click.option("--catalog", "catalog_path", type=click.Path(), default=None)
@click.option("--index", "index_path", type=click.Path(), default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=None)
@click.option("--ui-dir", type=click.Path(), default=None,
              help="Directory of built chat UI assets to serve at /.")
@click.pass_obj
def serve(config: dict, catalog_path: str | None, index_path: str | None,
          host: str, port: int | None, ui_dir: str | None):
    """Serve the query pipeline (and optionally the chat UI) over HTTP."""
    from .web import serve as run_server

    engine = _engine(config, catalog_path, index_path)
    run_server(
        engine,
        __version__,
        host=host,
        port=port if port is not None else int(config.get("port", 8040)),
        static_dir=ui_dir or _resolve_path(config, config.get("ui_dir")),
    )


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except (VidragError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
