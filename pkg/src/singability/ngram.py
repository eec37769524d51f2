"""Interpolated n-gram language model over lyric paragraphs.

Paragraphs are scored as one token stream: ``order - 1`` start symbols, then
each line's words followed by ``</s>``. The predictable vocabulary is the
training words plus ``</s>`` and ``<unk>``; ``<s>`` only appears in contexts.

    p(w | h) = sum_k lam_k p_k(w | h_k) / sum_k lam_k     (k over seen contexts)

with p_1 add-0.01 smoothed and p_k (k > 1) maximum likelihood.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .lexstats import paragraph_words

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
UNIGRAM_ADD = 0.01
FORMAT_VERSION = 1


def paragraph_tokens(paragraph) -> list[str]:
    lines = getattr(paragraph, "lines", paragraph)
    toks: list[str] = []
    for line in lines:
        toks.extend(line.split() if isinstance(line, str) else line)
        toks.append(EOS)
    return toks


def default_weights(order: int) -> tuple[float, ...]:
    # lam_k proportional to k: higher orders trusted more
    total = order * (order + 1) / 2
    return tuple(k / total for k in range(1, order + 1))


class NgramLM:
    def __init__(self, order: int, vocab: Iterable[str], counts: dict[int, dict], weights=None):
        if not 1 <= order <= 5:
            raise ValueError("order must be in 1..5")
        self.order = order
        self.weights = tuple(float(x) for x in (weights or default_weights(order)))
        if len(self.weights) != order or abs(sum(self.weights) - 1) > 1e-9:
            raise ValueError("need one non-negative weight per order, summing to 1")
        if self.weights[0] <= 0 or min(self.weights) < 0:
            raise ValueError("unigram weight must be positive and none negative")
        words = sorted(set(vocab) - {EOS, UNK, BOS})
        self.vocab: list[str] = [EOS, UNK] + words
        self.index = {w: i for i, w in enumerate(self.vocab)}
        # counts[k][context tuple] -> Counter(next token)
        self.counts = counts
        self._totals = {k: {ctx: sum(c.values()) for ctx, c in table.items()} for k, table in counts.items()}
        uni = counts.get(1, {}).get((), Counter())
        n_tokens = sum(uni.values())
        self._unigram = np.array(
            [(uni.get(w, 0) + UNIGRAM_ADD) for w in self.vocab], dtype=np.float64
        ) / (n_tokens + UNIGRAM_ADD * len(self.vocab))
        self._cache: dict[tuple, np.ndarray] = {}

    @classmethod
    def uniform(cls, words: Iterable[str]) -> "NgramLM":
        """Unigram model with no counts: every predictable symbol gets 1/|vocab|."""
        return cls(1, words, {1: {(): Counter()}})

    def _map(self, tok: str) -> str:
        return tok if tok in self.index or tok == BOS else UNK

    def context(self, history: Sequence[str]) -> tuple[str, ...]:
        n = self.order - 1
        if n == 0:
            return ()
        h = [BOS] * n + [self._map(t) for t in history]
        return tuple(h[-n:])

    def distribution(self, history: Sequence[str]) -> np.ndarray:
        """Next-token probabilities over ``self.vocab`` given the preceding tokens."""
        ctx = self.context(history)
        cached = self._cache.get(ctx)
        if cached is not None:
            return cached
        mix = self.weights[0] * self._unigram
        norm = self.weights[0]
        for k in range(2, self.order + 1):
            sub = ctx[len(ctx) - (k - 1):]
            total = self._totals[k].get(sub, 0)
            if total == 0 or self.weights[k - 1] == 0:
                continue
            ml = np.zeros(len(self.vocab))
            for w, c in self.counts[k][sub].items():
                ml[self.index[w]] = c / total
            mix = mix + self.weights[k - 1] * ml
            norm += self.weights[k - 1]
        dist = mix / norm
        self._cache[ctx] = dist
        return dist

    def prob(self, token: str, history: Sequence[str]) -> float:
        """Scalar p(token | history) without building the full distribution."""
        ctx = self.context(history)
        if ctx in self._cache:
            return float(self._cache[ctx][self.index.get(token, 1)])
        tok = self._map(token)
        mix = self.weights[0] * self._unigram[self.index[tok]]
        norm = self.weights[0]
        for k in range(2, self.order + 1):
            sub = ctx[len(ctx) - (k - 1):]
            total = self._totals[k].get(sub, 0)
            if total == 0 or self.weights[k - 1] == 0:
                continue
            mix += self.weights[k - 1] * self.counts[k][sub].get(tok, 0) / total
            norm += self.weights[k - 1]
        return mix / norm

    def logprob(self, token: str, history: Sequence[str], cache: bool = True) -> float:
        if not cache:
            return math.log(self.prob(token, history))
        return math.log(self.distribution(history)[self.index.get(token, 1)])

    def score_paragraph(self, paragraph) -> tuple[float, int]:
        """Total natural-log probability and number of scored tokens."""
        toks = paragraph_tokens(paragraph)
        total = 0.0
        for i, t in enumerate(toks):
            total += self.logprob(t, toks[max(0, i - self.order + 1):i])
        return total, len(toks)

    # -- serialization -------------------------------------------------------------

    def to_json(self) -> str:
        tables = {
            str(k): {" ".join(ctx): dict(sorted(c.items())) for ctx, c in sorted(table.items())}
            for k, table in sorted(self.counts.items())
        }
        payload = {
            "format": "singability-ngram",
            "version": FORMAT_VERSION,
            "order": self.order,
            "weights": list(self.weights),
            "unigram_add": UNIGRAM_ADD,
            "vocab": self.vocab,
            "counts": tables,
        }
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "NgramLM":
        d = json.loads(text)
        if d.get("format") != "singability-ngram" or d.get("version") != FORMAT_VERSION:
            raise ValueError("not a version-1 singability n-gram model")
        counts = {
            int(k): {tuple(ctx.split()) if ctx else (): Counter(c) for ctx, c in table.items()}
            for k, table in d["counts"].items()
        }
        return cls(d["order"], d["vocab"], counts, d["weights"])


def train_ngram(corpus: Iterable, order: int = 3, weights=None) -> NgramLM:
    if not 1 <= order <= 5:
        raise ValueError("order must be in 1..5")
    counts: dict[int, dict] = {k: defaultdict(Counter) for k in range(1, order + 1)}
    vocab: set[str] = set()
    n_para = 0
    for para in corpus:
        if not paragraph_words(para):
            continue
        n_para += 1
        toks = paragraph_tokens(para)
        vocab.update(toks)
        padded = [BOS] * (order - 1) + toks
        for i in range(order - 1, len(padded)):
            for k in range(1, order + 1):
                ctx = tuple(padded[i - k + 1:i])
                counts[k][ctx][padded[i]] += 1
    if n_para == 0:
        raise ValueError("empty corpus")
    return NgramLM(order, vocab, {k: dict(t) for k, t in counts.items()}, weights)


def load_lm(path: str | Path) -> NgramLM:
    return NgramLM.from_json(Path(path).read_text())
