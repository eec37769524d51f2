"""Objective measures: line/syllable accuracy, coexistence probabilities,
the joint wording + formatting loss, and n-gram perplexity.

Coexistence of a note property A and a syllable property B over a test set
X is

    Pr(A-B) = (1 / |X|) * sum over aligned pairs of JointCount(A, B) / Count(A)

Misaligned pairs, and aligned pairs without any A note, add 0 but still
count in |X|. The aligned-only variant divides by the number of aligned
pairs instead.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpusprep import LyricParagraph
from .lexstats import ImportanceModel, word_importance
from .melody import MelodyParagraph, long_note_flags, peak_flags
from .ngram import NgramLM
from .phonetics import PronLexicon, count_syllables, line_syllables

NOTE_PROPERTIES = ("long", "peak")
SYLLABLE_PROPERTIES = ("stress", "importance", "vowel")

# (column name, note property, syllable property)
COMPAT_PAIRS = (
    ("Dur-str", "long", "stress"),
    ("Peak-str", "peak", "stress"),
    ("Dur-imp", "long", "importance"),
    ("Peak-imp", "peak", "importance"),
    ("Dur-vow", "long", "vowel"),
)
TABLE_COLUMNS = ("PPL", "#Line", "Line len") + tuple(c for c, _, _ in COMPAT_PAIRS)


@dataclass(frozen=True)
class AlignedPair:
    """Note flags and syllable labels for one (melody, lyric) paragraph.

    ``notes`` maps "long"/"peak" to boolean arrays; ``syllables`` maps
    "stress"/"importance"/"vowel" to integer label arrays (0/1/2).
    """

    notes: Mapping[str, np.ndarray]
    syllables: Mapping[str, np.ndarray]
    melody: MelodyParagraph | None = field(default=None, compare=False)
    lyric: LyricParagraph | None = field(default=None, compare=False)

    @property
    def aligned(self) -> bool:
        return len(self.notes["long"]) == len(self.syllables["stress"])

    @classmethod
    def from_labels(cls, long, peak, stress, importance, vowel) -> "AlignedPair":
        return cls(
            {"long": np.asarray(long, dtype=bool), "peak": np.asarray(peak, dtype=bool)},
            {
                "stress": np.asarray(stress, dtype=np.int64),
                "importance": np.asarray(importance, dtype=np.int64),
                "vowel": np.asarray(vowel, dtype=np.int64),
            },
        )

    @classmethod
    def build(cls, melody: MelodyParagraph, lyric: LyricParagraph, lex: PronLexicon,
              importance: ImportanceModel) -> "AlignedPair":
        sylls = [ws for line in lyric.lines for ws in line_syllables(line, lex)]
        pair = cls.from_labels(
            long_note_flags(melody),
            peak_flags(melody),
            [s.stress for _, s in sylls],
            [word_importance(w, importance) for w, _ in sylls],
            [s.vowel_class for _, s in sylls],
        )
        return cls(pair.notes, pair.syllables, melody, lyric)


@dataclass(frozen=True)
class CompatReport:
    dur_str: float
    peak_str: float
    dur_imp: float
    peak_imp: float
    dur_vow: float
    line_count: float | None = None
    line_len: float | None = None
    ppl: float | None = None

    def row(self) -> dict[str, float | None]:
        return {
            "PPL": self.ppl,
            "#Line": self.line_count,
            "Line len": self.line_len,
            "Dur-str": self.dur_str,
            "Peak-str": self.peak_str,
            "Dur-imp": self.dur_imp,
            "Peak-imp": self.peak_imp,
            "Dur-vow": self.dur_vow,
        }

    def as_dict(self) -> dict:
        return asdict(self)


def pair_coexistence(pair: AlignedPair, a: str, b: str) -> float:
    """Per-pair JointCount / Count; 0 when misaligned or when no note has A."""
    if not pair.aligned:
        return 0.0
    has_a = pair.notes[a]
    count = int(has_a.sum())
    if count == 0:
        return 0.0
    joint = int((has_a & (pair.syllables[b] >= 1)).sum())
    return joint / count


def coexistence(pairs: Sequence[AlignedPair], a: str, b: str, aligned_only: bool = False) -> float:
    if a not in NOTE_PROPERTIES or b not in SYLLABLE_PROPERTIES:
        raise ValueError(f"unknown property pair ({a!r}, {b!r})")
    if len(pairs) == 0:
        raise ValueError("empty test set")
    # math.fsum: order-independent, exactly rounded
    total = math.fsum(pair_coexistence(p, a, b) for p in pairs)
    denom = sum(p.aligned for p in pairs) if aligned_only else len(pairs)
    return total / denom if denom else 0.0


def compatibility_suite(pairs: Sequence[AlignedPair], aligned_only: bool = False) -> CompatReport:
    scores = [100.0 * coexistence(pairs, a, b, aligned_only) for _, a, b in COMPAT_PAIRS]
    return CompatReport(*scores)


def _n_lines(x) -> int:
    return x if isinstance(x, int) else len(getattr(x, "lines", x))


def line_count_accuracy(outputs: Sequence, requirements: Sequence) -> float:
    """Percent of paragraphs with the required number of lines.

    Items may be paragraphs, line lists or plain line counts.
    """
    if len(outputs) != len(requirements):
        raise ValueError(f"{len(outputs)} outputs vs {len(requirements)} requirements")
    if not outputs:
        raise ValueError("nothing to score")
    hits = sum(_n_lines(o) == _n_lines(r) for o, r in zip(outputs, requirements))
    return 100.0 * hits / len(outputs)


def syllable_accuracy(outputs: Sequence, requirements: Sequence[Sequence[int]],
                      lex: PronLexicon) -> float:
    """Percent of line positions whose syllable count matches the requirement.

    Positions are counted over the longer of the two line lists per paragraph,
    so missing and extra lines are misses.
    """
    hits = total = 0
    for out, req in zip(outputs, requirements):
        lines = list(getattr(out, "lines", out))
        total += max(len(lines), len(req))
        hits += sum(count_syllables(l, lex) == r for l, r in zip(lines, req))
    return 100.0 * hits / total if total else 100.0


def multitask_loss(tok_nll, s_pred, i_pred, v_pred, s, i, v) -> float:
    """Mean token NLL plus the length-normalized sum of the three label cross-entropies."""
    tok_nll = np.asarray(tok_nll, dtype=np.float64)
    n = len(tok_nll)
    if n == 0:
        raise ValueError("need at least one position")
    total = 0.0
    for pred, gold in ((s_pred, s), (i_pred, i), (v_pred, v)):
        pred = np.asarray(pred, dtype=np.float64)
        gold = np.asarray(gold, dtype=np.int64)
        if pred.shape != (n, 3) or gold.shape != (n,):
            raise ValueError(f"expected ({n}, 3) probabilities and {n} labels, got {pred.shape} / {gold.shape}")
        if np.any(np.abs(pred.sum(axis=1) - 1.0) > 1e-6) or np.any(pred < 0):
            raise ValueError("classifier rows must be probability distributions")
        with np.errstate(divide="ignore"):
            total += -np.log(pred[np.arange(n), gold]).sum()
    return float(tok_nll.mean() + total / n)


def perplexity(lm: NgramLM, corpus: Iterable) -> float:
    """exp of the mean per-token NLL, end-of-line tokens included."""
    logp = 0.0
    n = 0
    for para in corpus:
        lp, k = lm.score_paragraph(para)
        logp += lp
        n += k
    if n == 0:
        raise ValueError("empty corpus")
    return math.exp(-logp / n)


# -- tables --------------------------------------------------------------------

def _fmt(x: float | None) -> str:
    return "-" if x is None else f"{x:.2f}"


def report_csv(rows: Sequence[tuple[str, CompatReport]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("Model",) + TABLE_COLUMNS)
    for name, rep in rows:
        w.writerow([name] + [_fmt(v) for v in rep.row().values()])
    return buf.getvalue()


def report_markdown(rows: Sequence[tuple[str, CompatReport]]) -> str:
    head = "| Model | " + " | ".join(TABLE_COLUMNS) + " |"
    sep = "|" + "---|" * (len(TABLE_COLUMNS) + 1)
    body = ["| " + " | ".join([name] + [_fmt(v) for v in rep.row().values()]) + " |" for name, rep in rows]
    return "\n".join([head, sep] + body) + "\n"
