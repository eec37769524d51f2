"""Pronunciation lexicon parsing and syllable labeling.

The lexicon format is the plain-text CMU layout::

    ;;; comment
    ALRIGHT  AO2 L R AY1 T
    HELLO  HH AH0 L OW1
    HELLO(2)  HH EH0 L OW1

Words are stored lowercased, variants in file order under the base word.
Syllables are split at vowel nuclei: consonants attach to the following
nucleus, trailing consonants to the last syllable.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

SHORT_VOWELS = frozenset({"IH", "EH", "AE", "AH", "UH"})
LONG_VOWELS = frozenset({"IY", "UW", "AA", "AO", "ER"})
DIPHTHONGS = frozenset({"AY", "AW", "OY", "EY", "OW"})
VOWELS = SHORT_VOWELS | LONG_VOWELS | DIPHTHONGS

SHORT, LONG, DIPHTHONG = 0, 1, 2

# placeholder nucleus for out-of-lexicon syllables (a short vowel)
OOV_NUCLEUS = "AH"

_VARIANT = re.compile(r"^(.+?)\((\d+)\)$")
_VOWEL_LETTERS = re.compile(r"[aeiouy]+")
_INLINE_COMMENT = re.compile(r"\s#.*$")


class LexiconParseError(ValueError):
    """Raised for a malformed lexicon line; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Syllable:
    phonemes: tuple[str, ...]
    nucleus: str
    stress: int
    vowel_class: int
    oov: bool = False


@dataclass(frozen=True)
class PronLexicon:
    entries: Mapping[str, tuple[tuple[str, ...], ...]] = field(default_factory=dict)
    _syllables: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def first(self, word: str) -> tuple[str, ...] | None:
        prons = self.entries.get(word.lower())
        return prons[0] if prons else None


def vowel_class(nucleus: str) -> int:
    """Map a vowel symbol (stress digit optional) to short=0, long=1, diphthong=2."""
    base = nucleus.rstrip("012")
    if base in SHORT_VOWELS:
        return SHORT
    if base in LONG_VOWELS:
        return LONG
    if base in DIPHTHONGS:
        return DIPHTHONG
    raise ValueError(f"unknown vowel symbol {nucleus!r}")


def _check_phoneme(ph: str, lineno: int) -> None:
    base, digit = (ph[:-1], ph[-1]) if ph[-1:].isdigit() else (ph, "")
    if base in VOWELS:
        if digit not in ("0", "1", "2"):
            raise LexiconParseError(lineno, f"vowel {ph!r} lacks a stress digit 0/1/2")
    elif digit:
        raise LexiconParseError(lineno, f"consonant {ph!r} carries a stress digit")


def parse_lexicon(source: str | Iterable[str]) -> PronLexicon:
    """Parse CMU-style dictionary text (a string or an iterable of lines)."""
    lines = source.splitlines() if isinstance(source, str) else source
    entries: dict[str, list[tuple[str, ...]]] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = _INLINE_COMMENT.sub("", raw).strip()
        if not line or line.startswith(";;;"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise LexiconParseError(lineno, f"no phonemes for {parts[0]!r}")
        head, phones = parts[0], tuple(p.upper() for p in parts[1:])
        m = _VARIANT.match(head)
        word = (m.group(1) if m else head).lower()
        for ph in phones:
            _check_phoneme(ph, lineno)
        entries.setdefault(word, []).append(phones)
    return PronLexicon({w: tuple(p) for w, p in entries.items()})


def load_lexicon(path: str | Path) -> PronLexicon:
    with open(path, encoding="latin-1") as fh:
        return parse_lexicon(fh)


def _oov_syllables(word: str) -> list[Syllable]:
    n = max(1, len(_VOWEL_LETTERS.findall(word)))
    logger.info("out-of-lexicon word %r: heuristic %d syllable(s)", word, n)
    return [
        Syllable((), OOV_NUCLEUS, 1 if k == 0 else 0, SHORT, oov=True)
        for k in range(n)
    ]


def syllabify(word: str, lex: PronLexicon) -> list[Syllable]:
    cached = lex._syllables.get(word)
    if cached is None:
        cached = lex._syllables[word] = tuple(_syllabify(word, lex))
    return list(cached)


def _syllabify(word: str, lex: PronLexicon) -> list[Syllable]:
    pron = lex.first(word)
    if pron is None:
        return _oov_syllables(word.lower())
    sylls: list[Syllable] = []
    pending: list[str] = []
    for ph in pron:
        if ph[-1].isdigit():
            nucleus = ph[:-1]
            sylls.append(
                Syllable(tuple(pending) + (nucleus,), nucleus, int(ph[-1]), vowel_class(nucleus))
            )
            pending = []
        else:
            pending.append(ph)
    if not sylls:
        # vowel-less entries (e.g. "hmm  HH M") fall back to the heuristic
        return _oov_syllables(word.lower())
    if pending:
        last = sylls[-1]
        sylls[-1] = Syllable(last.phonemes + tuple(pending), last.nucleus, last.stress, last.vowel_class)
    return sylls


def _words(line: str | Sequence[str]) -> Sequence[str]:
    return line.split() if isinstance(line, str) else line


def count_syllables(line: str | Sequence[str], lex: PronLexicon) -> int:
    return sum(len(syllabify(w, lex)) for w in _words(line))


def line_syllables(line: str | Sequence[str], lex: PronLexicon) -> list[tuple[str, Syllable]]:
    """Flatten a line into (word, syllable) pairs in order."""
    return [(w, s) for w in _words(line) for s in syllabify(w, lex)]
