"""Independent reference implementations used only by the tests."""

from fractions import Fraction
import math

import numpy as np


def quantize_oracle(notes, caps=(640, 640, 240)):
    """Direct evaluation of the quantization formulas in exact rational arithmetic.

    ``notes`` are (on, off, pitch) triples. Ratios within 1e-9 (relative) of
    an integer count as that integer, matching the library's tolerance for
    grid-aligned float times.
    """
    on = [Fraction(n[0]) for n in notes]
    off = [Fraction(n[1]) for n in notes]
    dur_u = min(b - a for a, b in zip(on, off))

    def q(x, cap):
        r = 10 * x / dur_u
        nearest = round(r)
        if abs(r - nearest) <= Fraction(1, 10**9) * max(1, abs(r)):
            v = nearest
        else:
            v = math.floor(r)
        return min(int(v), cap)

    rows = []
    for j, (a, b, p) in enumerate(notes):
        rest = caps[2] if j == 0 else q(on[j] - off[j - 1], caps[2])
        pitch = min(128, max(1, math.floor(Fraction(p) + Fraction(1, 2))))
        rows.append((q(on[j] - on[0], caps[0]), q(off[j] - on[j], caps[1]), rest, pitch))
    return rows


def random_notes(rng: np.random.Generator, n: int, grid: bool):
    """Sorted non-overlapping notes; grid=True puts times on a 1/16 s grid times a tempo factor."""
    t = float(rng.uniform(0, 5))
    tempo = float(rng.choice([1.0, 0.5, 0.6, 0.75, 1.2]))
    notes = []
    for _ in range(n):
        if grid:
            dur = int(rng.integers(1, 17)) / 16 * tempo
            gap = int(rng.choice([0, 0, 0, 1, 4, 40])) / 16 * tempo
        else:
            dur = float(rng.uniform(0.05, 2.0))
            gap = float(rng.choice([0.0, rng.uniform(0, 3), rng.uniform(0, 60)]))
        # occasional very long note/rest to hit the caps
        if rng.random() < 0.05:
            gap += float(rng.uniform(50, 200))
        if rng.random() < 0.05:
            dur *= 100
        t += gap
        notes.append((t, t + dur, float(rng.uniform(1.0, 128.0))))
        t += dur
    return notes


def coexistence_oracle(pairs, a, b, aligned_only=False):
    """Loop-based count of JointCount/Count, summed over aligned pairs."""
    total = Fraction(0)
    aligned = 0
    for p in pairs:
        xa = list(p.notes[a])
        yb = list(p.syllables[b])
        if len(xa) != len(yb):
            continue
        aligned += 1
        count = 0
        joint = 0
        for i in range(len(xa)):
            if xa[i]:
                count += 1
                if yb[i] in (1, 2):
                    joint += 1
        if count:
            total += Fraction(joint, count)
    denom = aligned if aligned_only else len(pairs)
    return float(total / denom) if denom else 0.0


def random_pairs(rng, n):
    """Random label pairs of length 1-12; roughly one in five is misaligned."""
    from singability.metrics import AlignedPair

    pairs = []
    for _ in range(n):
        m = int(rng.integers(1, 13))
        k = m if rng.random() > 0.2 else int(rng.integers(1, 13))
        pairs.append(AlignedPair.from_labels(
            rng.random(m) < 0.5,
            rng.random(m) < 0.3,
            rng.integers(0, 2, k),
            rng.integers(0, 3, k),
            rng.integers(0, 3, k),
        ))
    return pairs


def brute_force_rescore(candidates, target, weights):
    """Score every candidate by explicit enumeration and sort on the full tie-break key."""
    best = None
    for c in candidates:
        bonus = 0.0
        for j in range(len(c.stress)):
            bonus += weights[0] * (target.stress_t[j] == 1 and c.stress[j] >= 1)
            bonus += weights[1] * (c.importance[j] >= target.importance_t[j])
            bonus += weights[2] * (c.vowel[j] >= target.vowel_t[j])
        key = (-(c.lm_score + bonus), -c.lm_score, c.words)
        if best is None or key < best[0]:
            best = (key, c)
    return best[1]
