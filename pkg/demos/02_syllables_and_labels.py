"""
Syllables, stress and word importance
=====================================

Each lyric word is split into syllables with the bundled pronunciation
lexicon. Every syllable carries a stress digit and a vowel class, and the
word it belongs to gets an importance grade from TF-IDF over a corpus.
"""

from importlib import resources

from singability.corpusprep import load_corpus
from singability.lexstats import fit_tfidf, load_stopwords, word_importance
from singability.phonetics import count_syllables, line_syllables, load_lexicon

data = resources.files("singability.data")
lex = load_lexicon(str(data / "cmudict_trimmed.dict"))
print(len(lex), "words in the bundled lexicon")

line = "hello my golden river"
print(f"{line!r} has {count_syllables(line, lex)} syllables")
for word, syl in line_syllables(line, lex):
    print(f"  {word:8s} {'-'.join(syl.phonemes):12s} stress={syl.stress} vowel_class={syl.vowel_class}")

# Words the lexicon has never seen still get a guess (and a log message).
print("blorpteka ->", count_syllables("blorpteka", lex), "syllables")

# Importance: 0 for stopwords, then 1 or 2 around the median TF-IDF score.
corpus = [p for _, p in load_corpus(str(data / "toy_paired_lyrics.jsonl"))]
model = fit_tfidf(corpus, load_stopwords())
print(f"median threshold {model.threshold:.4f}")
for w in ("the", "love", "river", "memory", "unheardof"):
    print(f"  {w:10s} importance {word_importance(w, model)}")
