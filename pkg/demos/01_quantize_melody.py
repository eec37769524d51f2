"""
Turning a melody into tokens
============================

A melody paragraph is a list of (onset, offset, pitch) notes plus the
indices where each phrase ends. Quantization expresses every time in
tenths of the shortest note, so the same tune played at any tempo maps
to identical integers.
"""

from singability.melody import derive_format_targets, long_note_flags, peak_flags, quantize, validate_paragraph

# Two short phrases. Times are seconds, pitches MIDI numbers.
notes = [
    (0.00, 0.50, 60), (0.50, 0.75, 62), (0.75, 1.75, 67), (1.75, 2.00, 64),
    (2.50, 2.75, 62), (2.75, 3.25, 65), (3.25, 4.25, 60),
]
melody = validate_paragraph(notes, phrase_ends=[3, 6])
print("phrase lengths:", melody.phrase_lengths)

# The shortest note lasts 0.25 s, so it becomes 10 and everything else a multiple.
for n in quantize(melody):
    print(f"  onset {n.onset_q:4d}  dur {n.dur_q:3d}  rest {n.rest_q:3d}  pitch {n.pitch_q}")

# Playing twice as slow changes nothing.
assert quantize(melody.scaled(2.0)) == quantize(melody)

# Long notes are the longer half by rank; a peak sits strictly above both neighbours.
print("long:", [int(x) for x in long_note_flags(melody)])
print("peak:", [int(x) for x in peak_flags(melody)])

# Format targets say what kind of syllable would suit each note.
t = derive_format_targets(melody)
print("stress target    ", list(t.stress_t))
print("importance target", list(t.importance_t))
print("vowel target     ", list(t.vowel_t))
