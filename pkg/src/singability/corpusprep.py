"""Lyric corpus preparation: normalization, dedup, splits, length prompts, span masking."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .phonetics import PronLexicon, count_syllables

MAX_LINE_SYLLABLES = 32
NON_ENGLISH_RATIO = 0.2

MASK = "<mask>"
BREAK = "<b>"

_DISALLOWED = re.compile(r"[^a-z'\s]")


@dataclass(frozen=True)
class LyricParagraph:
    lines: tuple[tuple[str, ...], ...]

    @classmethod
    def from_lines(cls, lines: Iterable[str | Sequence[str]]) -> "LyricParagraph":
        return cls(tuple(tuple(l.split() if isinstance(l, str) else l) for l in lines))

    def text_lines(self) -> list[str]:
        return [" ".join(l) for l in self.lines]

    def text(self) -> str:
        return "\n".join(self.text_lines())

    def words(self) -> list[str]:
        return [w for l in self.lines for w in l]


@dataclass(frozen=True)
class Rejection:
    reason: str
    detail: str = ""

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class LengthPrompt:
    counts: tuple[int, ...]

    def __str__(self) -> str:
        return " ".join(f"<len_{c}>" for c in self.counts)

    @classmethod
    def parse(cls, text: str) -> "LengthPrompt":
        counts = []
        for tok in text.split():
            m = re.fullmatch(r"<len_(\d+)>", tok)
            if not m:
                raise ValueError(f"not a length token: {tok!r}")
            counts.append(int(m.group(1)))
        return cls(tuple(counts))


def normalize_text(raw: str) -> LyricParagraph | Rejection:
    """Lowercase, keep only letters/apostrophes/whitespace, drop blank lines.

    Paragraphs whose non-space characters are more than 20% non-ASCII are
    rejected as non-English before any stripping.
    """
    visible = [c for c in raw if not c.isspace()]
    if visible:
        ratio = sum(ord(c) > 127 for c in visible) / len(visible)
        if ratio > NON_ENGLISH_RATIO:
            return Rejection("non-english", f"{ratio:.0%} non-ASCII")
    lines = []
    for line in raw.lower().splitlines():
        words = _DISALLOWED.sub("", line).split()
        if words:
            lines.append(tuple(words))
    if not lines:
        return Rejection("empty-after-normalization")
    return LyricParagraph(tuple(lines))


def dedup_paragraphs(corpus: Iterable, key=None) -> list:
    """Drop exact repeats (by joined normalized text), keeping first occurrences."""
    key = key or LyricParagraph.text
    seen: set[str] = set()
    out = []
    for p in corpus:
        k = key(p)
        if k not in seen:
            seen.add(k)
            out.append(p)
    return out


def split_corpus(corpus: Sequence, ratios: Sequence[float], seed: int):
    """Seeded shuffle then cut into (train, valid, test).

    Valid and test sizes are rounded from their ratios; train takes the rest.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must be three non-negative numbers summing to 1, got {ratios}")
    n = len(corpus)
    order = np.random.default_rng(seed).permutation(n)
    n_valid = int(round(ratios[1] * n))
    n_test = min(int(round(ratios[2] * n)), n - n_valid)
    n_train = n - n_valid - n_test
    items = [corpus[i] for i in order]
    return items[:n_train], items[n_train:n_train + n_valid], items[n_train + n_valid:]


def make_length_prompt(p: LyricParagraph, lex: PronLexicon) -> LengthPrompt:
    counts = []
    for i, line in enumerate(p.lines):
        c = count_syllables(line, lex)
        if not 1 <= c <= MAX_LINE_SYLLABLES:
            raise ValueError(
                f"line {i} ({' '.join(line)!r}) has {c} syllables, outside 1..{MAX_LINE_SYLLABLES}"
            )
        counts.append(c)
    return LengthPrompt(tuple(counts))


def _span_mask(line_lengths: list[int], mask_ratio: float, mean_span: float, rng) -> np.ndarray:
    n = sum(line_lengths)
    masked = np.zeros(n, dtype=bool)
    target = int(round(mask_ratio * n))
    line_end = np.repeat(np.cumsum(line_lengths), line_lengths)
    while masked.sum() < target:
        span = max(1, int(rng.poisson(mean_span)))
        span = min(span, target - int(masked.sum()))
        free = np.flatnonzero(~masked)
        j = int(free[rng.integers(len(free))])
        stop = line_end[j]
        while span and j < stop and not masked[j]:
            masked[j] = True
            j += 1
            span -= 1
    return masked


def mask_spans(p: LyricParagraph, lex: PronLexicon, mask_ratio: float = 0.3,
               mean_span: float = 3.0, seed: int = 0) -> tuple[str, str]:
    """Corrupt a paragraph for length-aware denoising.

    Returns ``(src, tgt)``: src is the length prompt followed by the lines
    joined with ``<b>``, each maximal run of masked words within a line
    replaced by one ``<mask>``; tgt is the uncorrupted joined text.
    Spans never cross line breaks.
    """
    if not 0.0 <= mask_ratio <= 1.0:
        raise ValueError("mask_ratio must lie in [0, 1]")
    prompt = make_length_prompt(p, lex)
    rng = np.random.default_rng(seed)
    lengths = [len(l) for l in p.lines]
    masked = _span_mask(lengths, mask_ratio, mean_span, rng)
    out_lines = []
    k = 0
    for line in p.lines:
        toks: list[str] = []
        for w in line:
            if masked[k]:
                if not toks or toks[-1] != MASK:
                    toks.append(MASK)
            else:
                toks.append(w)
            k += 1
        out_lines.append(" ".join(toks))
    src = f"{prompt} " + f" {BREAK} ".join(out_lines)
    tgt = f" {BREAK} ".join(p.text_lines())
    return src, tgt


def count_masked(p: LyricParagraph, mask_ratio: float, mean_span: float, seed: int) -> int:
    """Number of words the masking draw for ``seed`` covers."""
    rng = np.random.default_rng(seed)
    return int(_span_mask([len(l) for l in p.lines], mask_ratio, mean_span, rng).sum())


# -- corpus files ---------------------------------------------------------------

def read_jsonl(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n")


def load_corpus(path: str | Path) -> list[tuple[str, LyricParagraph]]:
    """Read an already-normalized ``{"id", "lines"}`` JSONL corpus."""
    return [(str(r["id"]), LyricParagraph.from_lines(r["lines"])) for r in read_jsonl(path)]


def corpus_records(items: Iterable[tuple[str, LyricParagraph]]) -> list[dict]:
    return [{"id": pid, "lines": p.text_lines()} for pid, p in items]
