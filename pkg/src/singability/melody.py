"""Melody validation, time/pitch quantization, note flags and format targets.

Time quantization works per paragraph relative to the shortest note
``dur_u``::

    onset_q = min(floor(10 * (on_j - on_1) / dur_u), 640)
    dur_q   = min(floor(10 * (off_j - on_j) / dur_u), 640)
    rest_q  = 240 (sentinel) for j = 1,
              min(floor(10 * (on_j - off_{j-1}) / dur_u), 240) otherwise

The sentinel shares the value of the rest cap; both are kept so the token
space stays contiguous.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

VOCAB_ON = 640
VOCAB_DUR = 640
VOCAB_REST = 240
REST_SENTINEL = VOCAB_REST
PITCH_MIN, PITCH_MAX = 1, 128

# relative slack when flooring time ratios; keeps grid-aligned times
# (0.75 / 0.25 computed as 2.9999999999999996) on the intended integer
_SNAP = 1e-9


class MelodyValidationError(ValueError):
    code = "invalid-melody"


class NonPositiveDurationError(MelodyValidationError):
    code = "non-positive-duration"


class UnsortedNotesError(MelodyValidationError):
    code = "unsorted-notes"


class OverlappingNotesError(MelodyValidationError):
    code = "overlapping-notes"


class EmptyPhraseError(MelodyValidationError):
    code = "empty-phrase"


class PhraseEndsError(MelodyValidationError):
    code = "bad-phrase-ends"


class PitchRangeError(MelodyValidationError):
    code = "pitch-out-of-range"


@dataclass(frozen=True)
class Note:
    onset_s: float
    offset_s: float
    pitch_raw: float

    @property
    def duration(self) -> float:
        return self.offset_s - self.onset_s


@dataclass(frozen=True)
class MelodyParagraph:
    notes: tuple[Note, ...]
    phrase_ends: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.notes)

    @property
    def phrase_lengths(self) -> list[int]:
        starts = (-1,) + self.phrase_ends[:-1]
        return [e - s for s, e in zip(starts, self.phrase_ends)]

    def scaled(self, c: float) -> "MelodyParagraph":
        notes = tuple(Note(n.onset_s * c, n.offset_s * c, n.pitch_raw) for n in self.notes)
        return MelodyParagraph(notes, self.phrase_ends)


@dataclass(frozen=True)
class QuantizedNote:
    onset_q: int
    dur_q: int
    rest_q: int
    pitch_q: int


@dataclass(frozen=True)
class FormatTarget:
    stress_t: tuple[int, ...]
    importance_t: tuple[int, ...]
    vowel_t: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.stress_t)

    def slice(self, start: int, stop: int) -> "FormatTarget":
        return FormatTarget(
            self.stress_t[start:stop], self.importance_t[start:stop], self.vowel_t[start:stop]
        )


def hz_to_midi(freq: float) -> float:
    return 69.0 + 12.0 * math.log2(freq / 440.0)


def _as_note(raw) -> tuple[float, float, float]:
    if isinstance(raw, Note):
        return raw.onset_s, raw.offset_s, raw.pitch_raw
    if isinstance(raw, Mapping):
        return float(raw["on"]), float(raw["off"]), float(raw["pitch"])
    on, off, pitch = raw
    return float(on), float(off), float(pitch)


def validate_paragraph(
    raw_notes: Iterable, phrase_ends: Sequence[int], pitch_unit: str = "midi"
) -> MelodyParagraph:
    """Check and build a paragraph from (on, off, pitch) triples, dicts or Notes."""
    if pitch_unit not in ("midi", "hz"):
        raise ValueError(f"unknown pitch unit {pitch_unit!r}")
    notes: list[Note] = []
    for j, raw in enumerate(raw_notes):
        on, off, pitch = _as_note(raw)
        if not off > on:
            raise NonPositiveDurationError(f"note {j}: non-positive duration ({on} -> {off})")
        if pitch_unit == "hz":
            if pitch <= 0:
                raise PitchRangeError(f"note {j}: frequency {pitch} Hz is not positive")
            pitch = hz_to_midi(pitch)
        if not PITCH_MIN <= pitch <= PITCH_MAX:
            raise PitchRangeError(f"note {j}: pitch {pitch} outside MIDI {PITCH_MIN}..{PITCH_MAX}")
        if notes:
            prev = notes[-1]
            if on < prev.onset_s:
                raise UnsortedNotesError(f"note {j} starts before note {j - 1}")
            if on < prev.offset_s:
                raise OverlappingNotesError(f"note {j} overlaps note {j - 1}")
        notes.append(Note(on, off, pitch))
    if not notes:
        raise EmptyPhraseError("paragraph has no notes")
    ends = tuple(int(e) for e in phrase_ends)
    if not ends:
        raise EmptyPhraseError("paragraph has no phrases")
    prev = -1
    for e in ends:
        if e <= prev:
            raise EmptyPhraseError(f"phrase ending at note {e} is empty")
        prev = e
    if ends[-1] != len(notes) - 1:
        raise PhraseEndsError(
            f"last phrase must end at note {len(notes) - 1}, got {ends[-1]}"
        )
    return MelodyParagraph(tuple(notes), ends)


def infer_phrase_ends(raw_notes: Sequence, min_gap: float = 0.5) -> list[int]:
    """Phrase boundaries wherever the pause before the next note is >= ``min_gap`` s."""
    notes = [_as_note(n) for n in raw_notes]
    ends = [j for j in range(len(notes) - 1) if notes[j + 1][0] - notes[j][1] >= min_gap]
    if notes:
        ends.append(len(notes) - 1)
    return ends


def _qfloor(ratio: float) -> int:
    nearest = round(ratio)
    if abs(ratio - nearest) <= _SNAP * max(1.0, abs(ratio)):
        return int(nearest)
    return math.floor(ratio)


def quantize_pitch(pitch: float) -> int:
    return min(PITCH_MAX, max(PITCH_MIN, math.floor(pitch + 0.5)))


def quantize(p: MelodyParagraph) -> list[QuantizedNote]:
    notes = p.notes
    dur_u = min(n.duration for n in notes)
    on_1 = notes[0].onset_s
    out = []
    for j, n in enumerate(notes):
        onset_q = min(_qfloor(10 * (n.onset_s - on_1) / dur_u), VOCAB_ON)
        dur_q = min(_qfloor(10 * n.duration / dur_u), VOCAB_DUR)
        if j == 0:
            rest_q = REST_SENTINEL
        else:
            rest_q = min(_qfloor(10 * (n.onset_s - notes[j - 1].offset_s) / dur_u), VOCAB_REST)
        out.append(QuantizedNote(onset_q, dur_q, rest_q, quantize_pitch(n.pitch_raw)))
    return out


def long_note_flags(p: MelodyParagraph) -> list[bool]:
    """Flag the ceil(n/2) longest notes; ties go to the earlier note."""
    n = len(p.notes)
    order = sorted(range(n), key=lambda j: (-p.notes[j].duration, j))
    flags = [False] * n
    for j in order[: (n + 1) // 2]:
        flags[j] = True
    return flags


def peak_flags(p: MelodyParagraph) -> list[bool]:
    q = [quantize_pitch(n.pitch_raw) for n in p.notes]
    return [0 < j < len(q) - 1 and q[j] > q[j - 1] and q[j] > q[j + 1] for j in range(len(q))]


def derive_format_targets(p: MelodyParagraph) -> FormatTarget:
    long_ = long_note_flags(p)
    peak = peak_flags(p)
    stress = tuple(int(a or b) for a, b in zip(long_, peak))
    vowel = tuple(int(a) for a in long_)
    importance = tuple(int(a) + int(b) for a, b in zip(long_, peak))
    return FormatTarget(stress, importance, vowel)


def quantized_array(p: MelodyParagraph) -> np.ndarray:
    """(n, 4) int array of onset, duration, rest, pitch tokens."""
    return np.array([[q.onset_q, q.dur_q, q.rest_q, q.pitch_q] for q in quantize(p)], dtype=np.int64)


# -- melody files -------------------------------------------------------------

def load_melodies(path: str | Path) -> list[tuple[str, MelodyParagraph]]:
    """Read a melody JSON file; paragraphs without an ``id`` get their index."""
    data = json.loads(Path(path).read_text())
    unit = data.get("pitch_unit", "midi")
    out = []
    for k, para in enumerate(data["paragraphs"]):
        pid = str(para.get("id", k))
        try:
            out.append((pid, validate_paragraph(para["notes"], para["phrase_ends"], unit)))
        except MelodyValidationError as exc:
            raise type(exc)(f"paragraph {pid}: {exc}") from None
    return out


def dump_melodies(items: Sequence[tuple[str, MelodyParagraph]]) -> str:
    paragraphs = [
        {
            "id": pid,
            "notes": [{"on": n.onset_s, "off": n.offset_s, "pitch": n.pitch_raw} for n in p.notes],
            "phrase_ends": list(p.phrase_ends),
        }
        for pid, p in items
    ]
    return json.dumps({"pitch_unit": "midi", "paragraphs": paragraphs}, indent=1) + "\n"
