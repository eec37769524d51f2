import json
from pathlib import Path

import pytest

from singability.cli import PipelineConfig, main
from singability.corpusprep import read_jsonl

N_MELODIES = 6

TOY_LINES = [
    ["Hold me close tonight"], ["The night is young!"], ["We dance away"],
    ["Hello baby, hello"], ["Love me like a river"], ["The road is long"],
    ["You are my golden sky"], ["Alright, alright"], ["Fire in the rain"],
    ["Hero of the night"],
]


def write_corpus(path: Path, rows) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


@pytest.fixture(scope="module")
def small_melodies(tmp_path_factory, data_dir):
    d = tmp_path_factory.mktemp("mel")
    full = json.loads((data_dir / "toy_melodies.json").read_text())
    full["paragraphs"] = full["paragraphs"][:N_MELODIES]
    (d / "melodies.json").write_text(json.dumps(full))
    gold = [r for r in read_jsonl(str(data_dir / "toy_paired_lyrics.jsonl"))][:N_MELODIES]
    write_corpus(d / "gold.jsonl", gold)
    return d


def run(argv) -> int:
    return main([str(a) for a in argv])


def snapshot(out: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.is_file()}


def full_pipeline(out: Path, gold: Path):
    base = ["--out", out, "--config", out.parent / "cfg.json"]
    for cmd in (["prepare"], ["fit-lm"], ["fit-tfidf"], ["features"], ["generate"],
                ["evaluate"], ["evaluate", "--outputs", gold], ["report"]):
        assert run(cmd + base) == 0, cmd


@pytest.fixture(scope="module")
def pipeline_run(tmp_path_factory, small_melodies):
    root = tmp_path_factory.mktemp("pipe")
    (root / "cfg.json").write_text(json.dumps({
        "melodies": str(small_melodies / "melodies.json"), "beam_width": 8, "max_pool": 16,
    }))
    full_pipeline(root / "a", small_melodies / "gold.jsonl")
    full_pipeline(root / "b", small_melodies / "gold.jsonl")
    return root


def test_prepare_toy_corpus(tmp_path):
    rows = [{"id": f"p{i}", "lines": lines} for i, lines in enumerate(TOY_LINES)]
    rows += [{"id": "dupe1", "lines": ["hold me CLOSE tonight!!"]}, {"id": "dupe2", "lines": TOY_LINES[3]}]
    write_corpus(tmp_path / "c.jsonl", rows)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"corpus": "c.jsonl", "out_dir": "run"}))
    assert main(["prepare", "--config", str(cfg)]) == 0
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert manifest["paragraphs"] == 10 and manifest["duplicates_removed"] == 2
    assert manifest["splits"] == {"train": 8, "valid": 1, "test": 1}
    prompts = read_jsonl(str(tmp_path / "run" / "prompts_train.jsonl"))
    assert all(p["prompt"].startswith("<len_") for p in prompts)


def test_empty_corpus_is_a_stage_error(tmp_path, capsys):
    corpus = write_corpus(tmp_path / "empty.jsonl", [])
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"corpus": str(corpus), "out_dir": str(tmp_path / "o")}))
    assert main(["prepare", "--config", str(cfg)]) == 1
    assert "error: [prepare] empty corpus" in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"beam": 3}))
    assert main(["prepare", "--config", str(cfg)]) == 1
    assert "[config]" in capsys.readouterr().err


def test_missing_models(tmp_path, capsys):
    assert main(["generate", "--out", str(tmp_path)]) == 1
    assert "[generate]" in capsys.readouterr().err


def test_relative_paths_resolve_against_config(tmp_path):
    (tmp_path / "sub").mkdir()
    cfg_path = tmp_path / "sub" / "cfg.json"
    cfg_path.write_text(json.dumps({"corpus": "data.jsonl", "out_dir": "../out", "split": [0.5, 0.25, 0.25]}))
    cfg = PipelineConfig.load(str(cfg_path))
    assert Path(cfg.corpus) == (tmp_path / "sub" / "data.jsonl").resolve()
    assert Path(cfg.out_dir).resolve() == (tmp_path / "out").resolve()
    assert cfg.split == (0.5, 0.25, 0.25)


def test_reruns_are_byte_identical(pipeline_run):
    a, b = snapshot(pipeline_run / "a"), snapshot(pipeline_run / "b")
    assert set(a) >= {"train.jsonl", "manifest.json", "generated.jsonl", "eval_generated.json", "table.md"}
    assert a == b


def test_gold_lyrics_hit_structure_exactly(pipeline_run):
    ev = json.loads((pipeline_run / "a" / "eval_gold.json").read_text())
    for variant in ev["variants"].values():
        assert variant["line_count"] == 100.0 and variant["line_len"] == 100.0


def test_generated_lyrics_hit_structure_exactly(pipeline_run):
    ev = json.loads((pipeline_run / "a" / "eval_generated.json").read_text())
    assert ev["paragraphs"] == N_MELODIES
    assert ev["variants"]["all"]["line_count"] == 100.0
    assert ev["variants"]["all"]["line_len"] == 100.0


def test_features_rows(pipeline_run):
    rows = read_jsonl(str(pipeline_run / "a" / "features.jsonl"))
    assert len(rows) == N_MELODIES
    for r in rows:
        n = len(r["onset"])
        assert r["rest"][0] == 240 and min(r["duration"]) == 10
        assert len(r["stress_target"]) == len(r["long"]) == n


def test_report_table(pipeline_run):
    text = (pipeline_run / "a" / "table.md").read_text()
    header = text.splitlines()[0]
    for col in ("PPL", "#Line", "Line len", "Dur-str", "Peak-str", "Dur-imp", "Peak-imp", "Dur-vow"):
        assert col in header
    assert "gold" in text and "generated" in text


def test_evaluate_id_mismatch(pipeline_run, tmp_path, capsys):
    bad = write_corpus(tmp_path / "bad.jsonl", [{"id": "nope", "lines": ["hello"]}])
    cfg = pipeline_run / "cfg.json"
    code = main(["evaluate", "--config", str(cfg), "--out", str(pipeline_run / "a"),
                 "--outputs", str(bad), "--name", "zz_bad"])
    assert code == 1
    assert "id mismatch" in capsys.readouterr().err
