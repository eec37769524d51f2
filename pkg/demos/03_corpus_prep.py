"""
Cleaning a lyric corpus
=======================

Raw lyrics are normalized (lowercase, letters and apostrophes only),
mostly non-ASCII paragraphs are dropped, exact duplicates removed, and
the rest split with a seeded shuffle. Each paragraph then yields a
syllable-length prompt and a span-masked training pair.
"""

from importlib import resources

from singability.corpusprep import (
    dedup_paragraphs,
    make_length_prompt,
    mask_spans,
    normalize_text,
    read_jsonl,
    split_corpus,
)
from singability.phonetics import load_lexicon

data = resources.files("singability.data")
lex = load_lexicon(str(data / "cmudict_trimmed.dict"))

print(normalize_text("Hello, WORLD!\n\nDon't stop..."))
print(normalize_text("Ça va très très bien, été"))

records = read_jsonl(str(data / "toy_lyrics_raw.jsonl"))
kept = [p for p in (normalize_text("\n".join(r["lines"])) for r in records) if p]
unique = dedup_paragraphs(kept)
train, valid, test = split_corpus(unique, (0.8, 0.1, 0.1), seed=0)
print(f"{len(records)} raw -> {len(kept)} normalized -> {len(unique)} unique "
      f"-> {len(train)}/{len(valid)}/{len(test)}")

para = train[0]
print("\nparagraph:")
for l in para.text_lines():
    print("  ", l)
print("prompt:", make_length_prompt(para, lex))
src, tgt = mask_spans(para, lex, mask_ratio=0.3, mean_span=3.0, seed=1)
print("source:", src)
print("target:", tgt)
