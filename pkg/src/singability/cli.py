"""Command-line pipeline.

    singability prepare   normalize, dedup, split; write prompts and masked pairs
    singability fit-lm    train the n-gram LM on the train split
    singability fit-tfidf fit word-importance scores on the train split
    singability features  quantized tokens, note flags and format targets per melody
    singability generate  constrained lyrics for every melody
    singability evaluate  Table-style metrics for a set of lyrics against the melodies
    singability report    collect every evaluation into one table

All commands read one JSON config (``--config``); missing keys fall back to
the bundled toy data. Every artifact is written with sorted keys and no
timestamps, so reruns with the same config are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from . import corpusprep as cp
from .generator import GenConfig, generate_constrained, word_table
from .lexstats import fit_tfidf, load_importance_model, load_stopwords
from .melody import derive_format_targets, load_melodies, long_note_flags, peak_flags, quantize
from .metrics import (
    AlignedPair,
    CompatReport,
    compatibility_suite,
    line_count_accuracy,
    perplexity,
    report_csv,
    report_markdown,
    syllable_accuracy,
)
from .ngram import load_lm, train_ngram
from .phonetics import load_lexicon

log = logging.getLogger("singability")


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def _bundled(name: str) -> str:
    return str(resources.files("singability.data").joinpath(name))


@dataclass
class PipelineConfig:
    lexicon: str = field(default_factory=lambda: _bundled("cmudict_trimmed.dict"))
    stopwords: str = field(default_factory=lambda: _bundled("stopwords.txt"))
    corpus: str = field(default_factory=lambda: _bundled("toy_lyrics_raw.jsonl"))
    melodies: str = field(default_factory=lambda: _bundled("toy_melodies.json"))
    out_dir: str = "run"
    seed: int = 0
    split: tuple[float, float, float] = (0.8, 0.1, 0.1)
    mask_ratio: float = 0.3
    mean_span: float = 3.0
    lm_order: int = 3
    beam_width: int = 16
    max_pool: int = 64
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    aligned_only: bool = False

    @classmethod
    def load(cls, path: str | None) -> "PipelineConfig":
        if path is None:
            return cls()
        data = json.loads(Path(path).read_text())
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise StageError("config", f"unknown keys: {sorted(unknown)}")
        base = Path(path).resolve().parent
        for key in ("lexicon", "stopwords", "corpus", "melodies", "out_dir"):
            if key in data and not Path(data[key]).is_absolute():
                data[key] = str(base / data[key])
        for key in ("split", "weights"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    def validate(self, *keys: str) -> None:
        for key in keys:
            if not Path(getattr(self, key)).exists():
                raise StageError("config", f"{key} path does not exist: {getattr(self, key)}")

    @property
    def out(self) -> Path:
        return Path(self.out_dir)

    def gen_config(self) -> GenConfig:
        return GenConfig(self.beam_width, tuple(self.weights), self.seed, self.max_pool)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")


# -- commands ------------------------------------------------------------------

def cmd_prepare(cfg: PipelineConfig) -> dict:
    cfg.validate("lexicon", "corpus")
    lex = load_lexicon(cfg.lexicon)
    records = cp.read_jsonl(cfg.corpus)
    if not records:
        raise StageError("prepare", "empty corpus")
    kept, rejected = [], {}
    for r in records:
        result = cp.normalize_text("\n".join(r["lines"]))
        if result:
            kept.append((str(r["id"]), result))
        else:
            rejected[str(r["id"])] = result.reason
    unique = cp.dedup_paragraphs(kept, key=lambda item: item[1].text())
    if not unique:
        raise StageError("prepare", "empty corpus after normalization")
    try:
        splits = dict(zip(("train", "valid", "test"), cp.split_corpus(unique, cfg.split, cfg.seed)))
    except ValueError as exc:
        raise StageError("prepare", str(exc)) from None
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    skipped = {}
    for name, items in splits.items():
        cp.write_jsonl(out / f"{name}.jsonl", cp.corpus_records(items))
        prompts, masked = [], []
        for k, (pid, para) in enumerate(items):
            try:
                prompt = cp.make_length_prompt(para, lex)
            except ValueError as exc:
                skipped[pid] = str(exc)
                continue
            src, tgt = cp.mask_spans(para, lex, cfg.mask_ratio, cfg.mean_span, seed=cfg.seed * 1_000_003 + k)
            prompts.append({"id": pid, "prompt": str(prompt)})
            masked.append({"id": pid, "src": src, "tgt": tgt})
        cp.write_jsonl(out / f"prompts_{name}.jsonl", prompts)
        cp.write_jsonl(out / f"masked_{name}.jsonl", masked)
    manifest = {
        "input_paragraphs": len(records),
        "rejected": rejected,
        "duplicates_removed": len(kept) - len(unique),
        "paragraphs": len(unique),
        "splits": {name: len(items) for name, items in splits.items()},
        "lines": {name: sum(len(p.lines) for _, p in items) for name, items in splits.items()},
        "skipped_for_masking": skipped,
        "seed": cfg.seed,
    }
    _write_json(out / "manifest.json", manifest)
    return manifest


def _train_split(cfg: PipelineConfig, stage: str):
    path = cfg.out / "train.jsonl"
    if not path.exists():
        raise StageError(stage, f"{path} missing; run `prepare` first")
    return [p for _, p in cp.load_corpus(path)]


def cmd_fit_lm(cfg: PipelineConfig) -> Path:
    lm = train_ngram(_train_split(cfg, "fit-lm"), cfg.lm_order)
    path = cfg.out / "lm.json"
    path.write_text(lm.to_json())
    return path


def cmd_fit_tfidf(cfg: PipelineConfig) -> Path:
    cfg.validate("stopwords")
    model = fit_tfidf(_train_split(cfg, "fit-tfidf"), load_stopwords(cfg.stopwords))
    path = cfg.out / "tfidf.json"
    path.write_text(model.to_json())
    return path


def cmd_features(cfg: PipelineConfig) -> Path:
    cfg.validate("melodies")
    cfg.out.mkdir(parents=True, exist_ok=True)
    rows = []
    for pid, para in load_melodies(cfg.melodies):
        q = quantize(para)
        t = derive_format_targets(para)
        rows.append({
            "id": pid,
            "onset": [n.onset_q for n in q],
            "duration": [n.dur_q for n in q],
            "rest": [n.rest_q for n in q],
            "pitch": [n.pitch_q for n in q],
            "long": [int(x) for x in long_note_flags(para)],
            "peak": [int(x) for x in peak_flags(para)],
            "stress_target": list(t.stress_t),
            "importance_target": list(t.importance_t),
            "vowel_target": list(t.vowel_t),
            "prompt": str(cp.LengthPrompt(tuple(para.phrase_lengths))),
        })
    path = cfg.out / "features.jsonl"
    cp.write_jsonl(path, rows)
    return path


def _models(cfg: PipelineConfig, stage: str):
    for name in ("lm.json", "tfidf.json"):
        if not (cfg.out / name).exists():
            raise StageError(stage, f"{cfg.out / name} missing; run fit-lm / fit-tfidf first")
    return load_lm(cfg.out / "lm.json"), load_importance_model(cfg.out / "tfidf.json")


def cmd_generate(cfg: PipelineConfig, name: str = "generated") -> Path:
    cfg.validate("lexicon", "melodies")
    lex = load_lexicon(cfg.lexicon)
    lm, imp = _models(cfg, "generate")
    gcfg = cfg.gen_config()
    table = word_table(lm, lex, imp)
    rows = []
    for pid, para in load_melodies(cfg.melodies):
        prompt = cp.LengthPrompt(tuple(para.phrase_lengths))
        try:
            lyric = generate_constrained(lm, prompt, lex, gcfg, derive_format_targets(para), imp, table=table)
        except ValueError as exc:
            raise StageError("generate", f"paragraph {pid}: {exc}") from None
        rows.append({"id": pid, "lines": lyric.text_lines()})
    path = cfg.out / f"{name}.jsonl"
    cp.write_jsonl(path, rows)
    return path


def evaluate_outputs(melodies, outputs, lex, imp, lm=None, aligned_only: bool = False) -> CompatReport:
    """Full metric row for index-aligned (melody, lyric) paragraph lists."""
    pairs = [AlignedPair.build(m, o, lex, imp) for m, o in zip(melodies, outputs)]
    five = compatibility_suite(pairs, aligned_only)
    required = [m.phrase_lengths for m in melodies]
    return replace(
        five,
        line_count=line_count_accuracy(outputs, required),
        line_len=syllable_accuracy(outputs, required, lex),
        ppl=perplexity(lm, outputs) if lm is not None else None,
    )


def cmd_evaluate(cfg: PipelineConfig, outputs: str, name: str) -> dict:
    cfg.validate("lexicon", "melodies")
    lex = load_lexicon(cfg.lexicon)
    lm, imp = _models(cfg, "evaluate")
    melodies = dict(load_melodies(cfg.melodies))
    lyrics = dict(cp.load_corpus(outputs))
    missing = sorted(set(melodies) - set(lyrics))
    extra = sorted(set(lyrics) - set(melodies))
    if missing or extra:
        raise StageError("evaluate", f"id mismatch: no lyrics for {missing}, no melody for {extra}")
    ids = sorted(melodies)
    mels = [melodies[i] for i in ids]
    outs = [lyrics[i] for i in ids]
    variants = {
        "all": evaluate_outputs(mels, outs, lex, imp, lm, aligned_only=False),
        "aligned-only": evaluate_outputs(mels, outs, lex, imp, lm, aligned_only=True),
    }
    order = ["aligned-only", "all"] if cfg.aligned_only else ["all", "aligned-only"]
    rows = [(f"{name} ({v})", variants[v]) for v in order]
    out = cfg.out
    (out / f"report_{name}.csv").write_text(report_csv(rows))
    (out / f"report_{name}.md").write_text(report_markdown(rows))
    result = {
        "name": name,
        "outputs": Path(outputs).name,
        "paragraphs": len(ids),
        "primary": order[0],
        "variants": {v: rep.as_dict() for v, rep in variants.items()},
    }
    _write_json(out / f"eval_{name}.json", result)
    return result


def cmd_report(cfg: PipelineConfig) -> Path:
    evals = sorted(cfg.out.glob("eval_*.json"))
    if not evals:
        raise StageError("report", f"no eval_*.json in {cfg.out}; run `evaluate` first")
    rows = []
    for path in evals:
        d = json.loads(path.read_text())
        variant = "aligned-only" if cfg.aligned_only else "all"
        rows.append((d["name"], CompatReport(**d["variants"][variant])))
    (cfg.out / "table.csv").write_text(report_csv(rows))
    path = cfg.out / "table.md"
    note = (
        "PPL is the n-gram proxy perplexity of each lyric set (not comparable to neural "
        f"model perplexities). Coexistence denominator: {'aligned pairs' if cfg.aligned_only else 'all pairs'}.\n"
    )
    path.write_text(report_markdown(rows) + "\n" + note)
    return path


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline config")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="override the output directory")
    common.add_argument("--aligned-only", action="store_true", default=None,
                        help="divide coexistence by aligned pairs instead of all pairs")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="singability", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("prepare", "fit-lm", "fit-tfidf", "features", "report"):
        sub.add_parser(name, parents=[common])
    gen = sub.add_parser("generate", parents=[common])
    gen.add_argument("--weights", type=float, nargs=3, metavar=("W_S", "W_I", "W_V"))
    gen.add_argument("--name", default="generated", help="output stem (default: generated)")
    ev = sub.add_parser("evaluate", parents=[common])
    ev.add_argument("--outputs", help="lyrics JSONL to score (default: <out>/generated.jsonl)")
    ev.add_argument("--name", help="report name (default: outputs file stem)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = PipelineConfig.load(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out_dir = args.out
        if args.aligned_only:
            cfg.aligned_only = True
        cmd = args.command
        if cmd == "prepare":
            m = cmd_prepare(cfg)
            print(f"prepared {m['paragraphs']} paragraphs: {m['splits']}")
        elif cmd == "fit-lm":
            print(cmd_fit_lm(cfg))
        elif cmd == "fit-tfidf":
            print(cmd_fit_tfidf(cfg))
        elif cmd == "features":
            print(cmd_features(cfg))
        elif cmd == "generate":
            if args.weights is not None:
                cfg.weights = tuple(args.weights)
            print(cmd_generate(cfg, args.name))
        elif cmd == "evaluate":
            outputs = args.outputs or str(cfg.out / "generated.jsonl")
            if not Path(outputs).exists():
                raise StageError("evaluate", f"outputs file not found: {outputs}")
            r = cmd_evaluate(cfg, outputs, args.name or Path(outputs).stem)
            print(report_markdown([(r["name"], CompatReport(**r["variants"][r["primary"]]))]), end="")
        elif cmd == "report":
            print(cmd_report(cfg))
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: [{args.command}] {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
