"""Syllable-exact beam search over an n-gram LM, with format-aware rescoring.

Lines are generated one at a time. A hypothesis may only grow by words that
keep the remaining syllable budget reachable, and may only end (``</s>``)
at exactly the budget, so every finished line has the requested count.
The finished pool of each line is then rescored against the melody's
format targets and the winner becomes context for the next line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpusprep import MAX_LINE_SYLLABLES, LengthPrompt, LyricParagraph
from .lexstats import LOW, ImportanceModel, word_importance
from .melody import FormatTarget
from .ngram import EOS, NgramLM
from .phonetics import PronLexicon, syllabify


class InfeasibleBudgetError(ValueError):
    """No word sequence from the vocabulary has the required syllable count."""

    def __init__(self, line: int, budget: int):
        super().__init__(f"line {line}: no completion with exactly {budget} syllables")
        self.line = line
        self.budget = budget


@dataclass(frozen=True)
class GenConfig:
    beam_width: int = 16
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    seed: int = 0
    max_pool: int = 64

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if len(self.weights) != 3 or min(self.weights) < 0:
            raise ValueError("weights must be three non-negative numbers")
        if self.max_pool < 1:
            raise ValueError("max_pool must be >= 1")


@dataclass(frozen=True)
class Candidate:
    words: tuple[str, ...]
    lm_score: float
    stress: tuple[int, ...]
    importance: tuple[int, ...]
    vowel: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.stress)


def format_bonus(cand: Candidate, target: FormatTarget, weights: Sequence[float]) -> float:
    if len(cand) != len(target):
        raise ValueError(
            f"candidate has {len(cand)} syllables but the target slice has {len(target)}"
        )
    w_s, w_i, w_v = weights
    bonus = 0.0
    for j in range(len(cand)):
        if target.stress_t[j] == 1 and cand.stress[j] >= 1:
            bonus += w_s
        if cand.importance[j] >= target.importance_t[j]:
            bonus += w_i
        if cand.vowel[j] >= target.vowel_t[j]:
            bonus += w_v
    return bonus


def rescore_with_format(candidates: Sequence[Candidate], target: FormatTarget | None,
                        cfg: GenConfig) -> Candidate:
    """Best candidate by LM score plus weighted format matches.

    Ties go to the higher LM score, then the lexicographically smaller line.
    Without a target the LM-best candidate is returned.
    """
    if not candidates:
        raise ValueError("no candidates to rescore")

    def key(c: Candidate):
        total = c.lm_score if target is None else c.lm_score + format_bonus(c, target, cfg.weights)
        return (-total, -c.lm_score, c.words)

    return min(candidates, key=key)


class _WordTable:
    """Per-word syllable labels for the LM vocabulary words the lexicon covers."""

    def __init__(self, lm: NgramLM, lex: PronLexicon, importance: ImportanceModel | None):
        self.syllables = np.zeros(len(lm.vocab), dtype=np.int64)
        self.labels: dict[int, tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]] = {}
        for i, w in enumerate(lm.vocab):
            if w.startswith("<") or w not in lex:
                continue
            syl = syllabify(w, lex)
            imp = word_importance(w, importance) if importance else LOW
            self.syllables[i] = len(syl)
            self.labels[i] = (
                tuple(s.stress for s in syl),
                (imp,) * len(syl),
                tuple(s.vowel_class for s in syl),
            )
        self.usable = self.syllables > 0
        self.lengths = sorted(set(self.syllables[self.usable].tolist()))
        reach = [True] + [False] * MAX_LINE_SYLLABLES
        for r in range(1, MAX_LINE_SYLLABLES + 1):
            reach[r] = any(l <= r and reach[r - l] for l in self.lengths)
        self.reachable = reach

    def allowed(self, remaining: int) -> np.ndarray:
        ok = self.usable & (self.syllables <= remaining)
        idx = np.flatnonzero(ok)
        keep = [i for i in idx if self.reachable[remaining - self.syllables[i]]]
        return np.asarray(keep, dtype=np.int64)


def _candidate(words: tuple[str, ...], score: float, ids: Sequence[int], table: _WordTable) -> Candidate:
    stress: tuple[int, ...] = ()
    imp: tuple[int, ...] = ()
    vow: tuple[int, ...] = ()
    for i in ids:
        s, m, v = table.labels[i]
        stress += s
        imp += m
        vow += v
    return Candidate(words, score, stress, imp, vow)


def _top(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of entries scoring at least the k-th best (ties kept for exact ordering)."""
    if len(scores) <= k:
        return np.arange(len(scores))
    kth = np.partition(scores, len(scores) - k)[len(scores) - k]
    return np.flatnonzero(scores >= kth)


def beam_line(lm: NgramLM, history: Sequence[str], budget: int, table: _WordTable,
              cfg: GenConfig, line_no: int = 0) -> list[Candidate]:
    """Finished hypotheses (best first, at most ``max_pool``) for one line.

    Hypotheses that hit the budget are closed with ``</s>``; only the
    ``4 * max_pool`` best of them per step are scored for the closing token.
    """
    if not 1 <= budget <= MAX_LINE_SYLLABLES or not table.reachable[budget]:
        raise InfeasibleBudgetError(line_no, budget)
    history = list(history)
    allowed: dict[int, np.ndarray] = {}
    # hypothesis: (score, words, word ids, syllables used)
    beam: list[tuple[float, tuple[str, ...], tuple[int, ...], int]] = [(0.0, (), (), 0)]
    finished: list[tuple[float, tuple[str, ...], tuple[int, ...]]] = []
    while beam:
        scores, owners, wids = [], [], []
        for h, (score, words, _, used) in enumerate(beam):
            remaining = budget - used
            if remaining not in allowed:
                allowed[remaining] = table.allowed(remaining)
            cand = allowed[remaining]
            logp = np.log(lm.distribution(history + list(words)))
            scores.append(score + logp[cand])
            owners.append(np.full(len(cand), h))
            wids.append(cand)
        score_v = np.concatenate(scores)
        owner_v = np.concatenate(owners)
        wid_v = np.concatenate(wids)
        used_v = np.array([b[3] for b in beam], dtype=np.int64)[owner_v] + table.syllables[wid_v]
        done = used_v == budget

        def expand(sel):
            out = []
            for e in sel.tolist():
                score, words, ids, used = beam[owner_v[e]]
                w = int(wid_v[e])
                out.append((float(score_v[e]), words + (lm.vocab[w],), ids + (w,), int(used_v[e])))
            return sorted(out, key=lambda x: (-x[0], x[1]))

        open_idx = np.flatnonzero(~done)
        done_idx = np.flatnonzero(done)
        closing = expand(done_idx[_top(score_v[done_idx], 4 * cfg.max_pool)])
        for score, words, ids, _ in closing:
            finished.append((score + lm.logprob(EOS, history + list(words), cache=False), words, ids))
        finished = sorted(finished, key=lambda f: (-f[0], f[1]))[: cfg.max_pool]
        beam = expand(open_idx[_top(score_v[open_idx], cfg.beam_width)])[: cfg.beam_width]
    if not finished:
        raise InfeasibleBudgetError(line_no, budget)
    return [_candidate(w, s, ids, table) for s, w, ids in finished]


def generate_constrained(lm: NgramLM, prompt: LengthPrompt, lex: PronLexicon,
                         cfg: GenConfig = GenConfig(), targets: FormatTarget | None = None,
                         importance: ImportanceModel | None = None,
                         table: _WordTable | None = None) -> LyricParagraph:
    """One line per prompt entry, each with exactly the prompted syllable count.

    ``targets`` covers the whole paragraph (one entry per note) and is sliced
    per line. Format rescoring is skipped when it is None.
    """
    if targets is not None and len(targets) != sum(prompt.counts):
        raise ValueError(
            f"targets cover {len(targets)} notes but the prompt asks for {sum(prompt.counts)} syllables"
        )
    table = table or _WordTable(lm, lex, importance)
    history: list[str] = []
    lines = []
    start = 0
    for k, budget in enumerate(prompt.counts):
        pool = beam_line(lm, history, budget, table, cfg, line_no=k)
        tslice = targets.slice(start, start + budget) if targets is not None else None
        best = rescore_with_format(pool, tslice, cfg)
        lines.append(best.words)
        history.extend(best.words)
        history.append(EOS)
        start += budget
    return LyricParagraph(tuple(lines))


def word_table(lm: NgramLM, lex: PronLexicon, importance: ImportanceModel | None = None) -> _WordTable:
    """Precompute per-word labels once for repeated generation calls."""
    return _WordTable(lm, lex, importance)
