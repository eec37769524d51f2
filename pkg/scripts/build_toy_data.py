"""Regenerate the bundled toy data in src/singability/data/.

    python scripts/build_toy_data.py /path/to/cmudict.dict

Writes:
  cmudict_trimmed.dict   CMU entries for every word the toy data uses
  toy_lyrics_raw.jsonl   raw text-only corpus (mixed case, punctuation,
                         repeated choruses, a few non-English paragraphs)
  toy_paired_lyrics.jsonl / toy_melodies.json
                         200 paragraphs with a melody fitted note-per-syllable

Lyrics come from a small template grammar; melodies give stressed syllables
longer and higher notes more often than unstressed ones, loosely like sung
English, so gold lyrics score above chance on the compatibility metrics.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "singability" / "data"
sys.path.insert(0, str(ROOT / "src"))

from singability.lexstats import load_stopwords  # noqa: E402
from singability.phonetics import parse_lexicon, syllabify  # noqa: E402

SLOTS = {
    "SUBJ": "i you we they she he".split(),
    "VERB_T": "hold need love miss call find keep feel want remember follow carry".split(),
    "VERB_I": "dance run fall shine wait cry sing fly breathe wander believe".split(),
    "OBJ": "you me us her him".split(),
    "DET": "the my your our".split(),
    "ADJ": ("broken golden lonely silent endless gentle burning quiet restless "
            "beautiful empty distant tender wild").split(),
    "NOUN": ("heart night fire light rain sky river road dream song world star "
             "ocean morning window shadow memory city summer highway garden heaven").split(),
    "PLACE": "tonight forever tomorrow again alone together away".split(),
    "PREP": "in under across beyond through along".split(),
    "INTJ": "oh yeah baby alright".split(),
}

TEMPLATES = [
    "SUBJ VERB_T OBJ PLACE",
    "SUBJ VERB_T DET ADJ NOUN",
    "SUBJ VERB_I PREP DET NOUN",
    "SUBJ VERB_I PREP DET ADJ NOUN",
    "DET NOUN is ADJ PLACE",
    "INTJ SUBJ VERB_I PLACE",
    "SUBJ will VERB_T OBJ PREP DET NOUN",
    "SUBJ can VERB_I PLACE",
    "like a ADJ NOUN PREP DET NOUN",
    "SUBJ never VERB_T DET NOUN",
    "and SUBJ VERB_I PREP DET ADJ NOUN",
    "DET ADJ NOUN is calling OBJ",
    "hero of DET ADJ NOUN",
    "hello DET ADJ world",
    "INTJ INTJ",
]

EXTRA_WORDS = "alright hero hello world the".split()

RAW_PUNCT = [",", "!", "...", "?", ""]


def make_line(rng: random.Random) -> str:
    out = []
    for tok in rng.choice(TEMPLATES).split():
        out.append(rng.choice(SLOTS[tok]) if tok in SLOTS else tok)
    return " ".join(out)


def make_paragraph(rng: random.Random) -> list[str]:
    return [make_line(rng) for _ in range(rng.randint(2, 5))]


def rawify(lines: list[str], rng: random.Random) -> list[str]:
    out = []
    for line in lines:
        words = line.split()
        words[0] = words[0].capitalize()
        words = [w.capitalize() if w == "i" else w for w in words]
        out.append(" ".join(words) + rng.choice(RAW_PUNCT))
        if rng.random() < 0.1:
            out.append("")
    return out


def grammar_words() -> set[str]:
    words = set()
    for t in TEMPLATES:
        for tok in t.split():
            words.update(SLOTS.get(tok, [tok]))
    return words


def fit_melody(lines: list[str], lex, rng: random.Random) -> dict:
    notes = []
    ends = []
    t = 0.0
    pitch = rng.randint(60, 67)
    for line in lines:
        for w in line.split():
            sylls = syllabify(w, lex)
            for syl in sylls:
                stressed = syl.stress >= 1 and (len(sylls) > 1 or w not in STOP)
                if stressed:
                    dur = rng.choice([0.5, 0.75, 1.0, 1.0, 0.25])
                    step = rng.choice([2, 3, 4, -1, -2])
                else:
                    dur = rng.choice([0.25, 0.25, 0.5, 0.75])
                    step = rng.choice([-2, -3, -1, 1, 0])
                pitch = min(79, max(55, pitch + step))
                notes.append({"on": t, "off": t + dur, "pitch": float(pitch)})
                t += dur + rng.choice([0.0, 0.0, 0.0, 0.25])
        ends.append(len(notes) - 1)
        t += rng.choice([0.5, 0.75, 1.0])
    return {"notes": notes, "phrase_ends": ends}


def main(cmudict_path: str) -> None:
    rng = random.Random(20240501)
    global STOP
    STOP = load_stopwords(DATA / "stopwords.txt")

    words = grammar_words() | set(EXTRA_WORDS) | set(STOP)
    full = Path(cmudict_path).read_text(encoding="latin-1").splitlines()
    keep = []
    for line in full:
        body = line.split(" #", 1)[0].strip()
        if not body or body.startswith(";;;"):
            continue
        head, *phones = body.split()
        base = head.split("(", 1)[0].lower()
        # vowel-less entries have no syllables to label
        if base in words and any(p[-1].isdigit() for p in phones):
            keep.append(f"{head.upper()}  {' '.join(p.upper() for p in phones)}")
    header = [
        ";;; Trimmed from the CMU Pronouncing Dictionary (cmudict 1.1.3 / 0.7b data).",
        ";;; Copyright (C) 1993-2015 Carnegie Mellon University. BSD-style license;",
        ";;; see CMUDICT_LICENSE in this directory.",
    ]
    (DATA / "cmudict_trimmed.dict").write_text("\n".join(header + keep) + "\n", encoding="latin-1")
    lex = parse_lexicon(keep)
    missing = sorted(w for w in grammar_words() if w not in lex)
    if missing:
        raise SystemExit(f"grammar words missing from lexicon: {missing}")

    raw = []
    choruses = [make_paragraph(rng) for _ in range(20)]
    for k in range(600):
        if rng.random() < 0.08:
            lines = rng.choice(choruses)
        else:
            lines = make_paragraph(rng)
        raw.append({"id": f"t{k:04d}", "lines": rawify(lines, rng)})
    raw.append({"id": "t_fr", "lines": ["Où est passé l'été? Ça brûle encore", "Déjà vu, naïve ère"]})
    raw.append({"id": "t_jp", "lines": ["夜空に光る星を見て", "君を思い出す"]})
    raw.append({"id": "t_punct", "lines": ["!!! ... ???", "--"]})
    with open(DATA / "toy_lyrics_raw.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for r in raw:
            fh.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")

    paired, melodies = [], []
    for k in range(200):
        lines = make_paragraph(rng)
        pid = f"m{k:03d}"
        paired.append({"id": pid, "lines": lines})
        melodies.append({"id": pid, **fit_melody(lines, lex, rng)})
    with open(DATA / "toy_paired_lyrics.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for r in paired:
            fh.write(json.dumps(r, sort_keys=True) + "\n")
    (DATA / "toy_melodies.json").write_text(
        json.dumps({"pitch_unit": "midi", "paragraphs": melodies}, indent=1) + "\n"
    )
    print(f"lexicon {len(lex)} words, raw corpus {len(raw)}, paired {len(paired)}")


STOP: frozenset[str] = frozenset()

if __name__ == "__main__":
    main(sys.argv[1])
