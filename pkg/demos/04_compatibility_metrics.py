"""
How well do lyrics fit a melody?
================================

Coexistence scores ask, for every note with a property A (long, or a
peak), how often the syllable sung on it has property B (stressed,
important, or a long vowel). Pairs whose syllable count does not match
the note count score zero but still count toward the average, unless
the aligned-only variant is requested.
"""

from importlib import resources

from singability.corpusprep import load_corpus
from singability.lexstats import fit_tfidf, load_stopwords
from singability.melody import load_melodies
from singability.metrics import AlignedPair, compatibility_suite, multitask_loss, report_markdown
from singability.phonetics import load_lexicon
import numpy as np

data = resources.files("singability.data")
lex = load_lexicon(str(data / "cmudict_trimmed.dict"))
melodies = dict(load_melodies(str(data / "toy_melodies.json")))
lyrics = dict(load_corpus(str(data / "toy_paired_lyrics.jsonl")))
imp = fit_tfidf(list(lyrics.values()), load_stopwords())

pairs = [AlignedPair.build(melodies[k], lyrics[k], lex, imp) for k in sorted(melodies)]
print(report_markdown([("original", compatibility_suite(pairs))]))

# Misalignment costs: drop the last word of every other lyric and recompute both ways.
def clip(p):
    return type(p)(p.lines[:-1] + (p.lines[-1][:-1],)) if len(p.lines[-1]) > 1 else p

broken = [AlignedPair.build(melodies[k], clip(lyrics[k]) if i % 2 else lyrics[k], lex, imp)
          for i, k in enumerate(sorted(melodies))]
print(report_markdown([
    ("clipped, all pairs", compatibility_suite(broken)),
    ("clipped, aligned only", compatibility_suite(broken, aligned_only=True)),
]))

# The joint training objective: token NLL plus three 3-way label classifiers.
y = np.array([1, 0, 2])
sharp = np.eye(3)[y] * 0.9 + 0.1 / 3
flat = np.full((3, 3), 1 / 3)
print("confident classifiers:", round(multitask_loss([0.5] * 3, sharp, sharp, sharp, y, y, y), 4))
print("uniform classifiers:  ", round(multitask_loss([0.5] * 3, flat, flat, flat, y, y, y), 4))
