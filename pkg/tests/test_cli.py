import json

import pytest
from click.testing import CliRunner

from conftest import FIXTURES
from vidrag.cli import cli, main
from vidrag.index import load_index
from vidrag.transcript import parse_rendered


@pytest.fixture()
def runner():
    return CliRunner()


CONFIG = ["--config", str(FIXTURES / "config.yaml")]


def test_ingest_ok(runner):
    result = runner.invoke(cli, CONFIG + ["ingest"])
    assert result.exit_code == 0
    assert "catalog OK: 8 videos" in result.output


def test_ingest_stats_table(runner):
    result = runner.invoke(cli, CONFIG + ["ingest", "--stats"])
    assert result.exit_code == 0
    assert "Video Count" in result.output
    assert "Aligned Captions" in result.output


def test_ingest_stats_json_matches_frozen(runner):
    result = runner.invoke(cli, CONFIG + ["ingest", "--stats", "--json"])
    assert result.exit_code == 0
    expected = json.loads((FIXTURES / "mini_stats_expected.json").read_text())
    assert json.loads(result.output) == expected


def test_align_writes_transcripts(runner, tmp_path, catalog):
    out = tmp_path / "transcripts"
    result = runner.invoke(cli, CONFIG + ["align", "--out", str(out)])
    assert result.exit_code == 0
    files = sorted(out.glob("*.avc.txt"))
    assert len(files) == 8
    text = (out / "pasta-carbonara-basics.avc.txt").read_text(encoding="utf-8")
    doc = next(d for d in catalog if d.video_id == "pasta-carbonara-basics")
    assert parse_rendered(text.rstrip("\n"), video_id=doc.video_id) == doc.aligned()


def test_index_build_and_inspect(runner, tmp_path):
    out = tmp_path / "title.vrix"
    result = runner.invoke(
        cli, CONFIG + ["index", "build", "--variant", "title", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "indexed 8 entries" in result.output
    index = load_index(out)
    assert len(index) == 8

    inspect = runner.invoke(cli, ["index", "inspect", str(out), "--json"])
    assert inspect.exit_code == 0
    info = json.loads(inspect.output)
    assert info["entries"] == 8
    assert info["metadata"]["variant"] == "title"


def test_index_build_reports_skips(runner, tmp_path):
    out = tmp_path / "asr.vrix"
    result = runner.invoke(
        cli, CONFIG + ["index", "build", "--variant", "asr", "--out", str(out)]
    )
    assert result.exit_code == 0
    assert "skipped 1 videos" in result.output
    assert "origami-crane-tutorial" in result.output


def test_query_json_output(runner):
    result = runner.invoke(
        cli,
        CONFIG + ["query", "how do i make pasta carbonara at home", "--json"],
    )
    assert result.exit_code == 0, result.output
    body = json.loads(result.output)
    assert body["answer_type"] == "how_to"
    assert body["citations"]


def test_query_human_output_has_steps_and_citations(runner):
    result = runner.invoke(
        cli, CONFIG + ["query", "how do i make pasta carbonara at home"]
    )
    assert result.exit_code == 0
    assert "1." in result.output
    assert "How to Make Classic Pasta Carbonara" in result.output


def test_query_missing_index_is_operational_error(runner, tmp_path):
    result = runner.invoke(
        cli,
        CONFIG + ["query", "anything", "--index", str(tmp_path / "missing.vrix")],
    )
    assert result.exit_code == 1
    assert "index not found" in str(result.exception or result.output)


def test_query_with_prebuilt_index(runner, tmp_path):
    out = tmp_path / "aligned.vrix"
    built = runner.invoke(
        cli, CONFIG + ["index", "build", "--variant", "aligned_transcript",
                       "--out", str(out)]
    )
    assert built.exit_code == 0
    result = runner.invoke(
        cli,
        CONFIG + ["query", "how do i make pasta carbonara at home",
                  "--index", str(out), "--json"],
    )
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["answer_type"] == "how_to"


def test_unknown_flag_is_usage_error(runner):
    result = runner.invoke(cli, ["ingest", "--bogus"])
    assert result.exit_code == 2


def test_main_exit_codes(tmp_path, capsys):
    assert main(["--config", str(FIXTURES / "config.yaml"), "ingest"]) == 0
    assert main(["ingest", "--bogus"]) == 2
    missing = str(tmp_path / "nope.jsonl")
    assert main(["ingest", "--catalog", missing]) == 1
    err = capsys.readouterr().err
    assert "error:" in err


def test_gen_questions_deterministic_bytes(runner, tmp_path):
    out1 = tmp_path / "q1.jsonl"
    out2 = tmp_path / "q2.jsonl"
    for out in (out1, out2):
        result = runner.invoke(
            cli,
            CONFIG + ["gen-questions", "--n-videos", "8", "--n-questions", "10",
                      "--seed", "7", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() == (FIXTURES / "questions.jsonl").read_bytes()


def test_eval_summaries_table(runner):
    result = runner.invoke(cli, CONFIG + ["eval", "summaries"])
    assert result.exit_code == 0, result.output
    assert "PROMPT CONTEXT" in result.output
    assert "Visual Captions" in result.output


def test_eval_retrieval_writes_reports(runner, tmp_path):
    prefix = str(tmp_path / "report")
    result = runner.invoke(
        cli,
        CONFIG + ["eval", "retrieval", "--questions",
                  str(FIXTURES / "questions.jsonl"), "--out", prefix],
    )
    assert result.exit_code == 0, result.output
    assert "EMBEDDING" in result.output
    report = json.loads((tmp_path / "report.json").read_text())
    assert len(report["reports"]) == 5
    assert (tmp_path / "report.txt").exists()
    csv_lines = (tmp_path / "report.csv").read_text().splitlines()
    assert len(csv_lines) == 6
