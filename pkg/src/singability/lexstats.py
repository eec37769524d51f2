"""Word importance labels from TF-IDF over a lyric corpus.

Labels: 0 = stopword, 1 = non-stop word scoring at or below the median,
2 = non-stop word scoring above it. Each deduplicated paragraph is one
document.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

STOP, LOW, HIGH = 0, 1, 2


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read one lowercase word per line; the bundled list when ``path`` is None."""
    if path is None:
        text = resources.files("singability.data").joinpath("stopwords.txt").read_text()
    else:
        text = Path(path).read_text()
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def paragraph_words(paragraph) -> list[str]:
    """Flatten a paragraph (LyricParagraph, list of line strings, or list of token lists)."""
    lines = getattr(paragraph, "lines", paragraph)
    if isinstance(lines, str):
        lines = lines.splitlines()
    words: list[str] = []
    for line in lines:
        words.extend(line.split() if isinstance(line, str) else line)
    return words


@dataclass(frozen=True)
class ImportanceModel:
    stopwords: frozenset[str]
    score: Mapping[str, float] = field(default_factory=dict)
    threshold: float = 0.0

    def label(self, word: str) -> int:
        return word_importance(word, self)

    def to_json(self) -> str:
        payload = {
            "score": dict(sorted(self.score.items())),
            "stopwords": sorted(self.stopwords),
            "threshold": self.threshold,
        }
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ImportanceModel":
        d = json.loads(text)
        return cls(frozenset(d["stopwords"]), dict(d["score"]), float(d["threshold"]))


def _lower_median(values: list[float]) -> float:
    if not values:
        return 0.0
    s = sorted(values)
    return s[(len(s) - 1) // 2]


def fit_tfidf(corpus: Iterable, stopwords: Iterable[str]) -> ImportanceModel:
    """Fit mean-over-containing-documents TF-IDF scores.

    TF is the in-paragraph count over paragraph length, IDF is ln(N / df).
    The threshold is the lower median of the non-stop scores.
    """
    stop = frozenset(stopwords)
    docs = [Counter(ws) for ws in (paragraph_words(p) for p in corpus) if ws]
    if not docs:
        raise ValueError("empty corpus")
    n_docs = len(docs)
    df: Counter[str] = Counter()
    tf_sum: dict[str, float] = {}
    for counts in docs:
        length = sum(counts.values())
        for w, c in counts.items():
            df[w] += 1
            tf_sum[w] = tf_sum.get(w, 0.0) + c / length
    # mean of tf*idf over containing docs = idf * (sum of tf) / df
    score = {w: math.log(n_docs / df[w]) * tf_sum[w] / df[w] for w in sorted(df)}
    threshold = _lower_median([s for w, s in score.items() if w not in stop])
    return ImportanceModel(stop, score, threshold)


def word_importance(word: str, model: ImportanceModel) -> int:
    if word in model.stopwords:
        return STOP
    return HIGH if model.score.get(word, 0.0) > model.threshold else LOW


def load_importance_model(path: str | Path) -> ImportanceModel:
    return ImportanceModel.from_json(Path(path).read_text())
