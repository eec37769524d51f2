import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singability.corpusprep import LyricParagraph
from singability.metrics import (
    COMPAT_PAIRS,
    TABLE_COLUMNS,
    AlignedPair,
    CompatReport,
    coexistence,
    compatibility_suite,
    line_count_accuracy,
    multitask_loss,
    report_csv,
    report_markdown,
    syllable_accuracy,
)

from oracles import coexistence_oracle, random_pairs

P = LyricParagraph.from_lines


def pair(long, stress, peak=None, importance=None, vowel=None):
    n, m = len(long), len(stress)
    return AlignedPair.from_labels(long, peak or [False] * n, stress,
                                   importance or [0] * m, vowel or [0] * m)


class TestCoexistence:
    def test_counting_example(self):
        assert coexistence([pair([1, 0, 1, 0], [1, 0, 0, 1])], "long", "stress") == 0.5

    def test_saturation(self):
        assert coexistence([pair([1, 1, 1], [1, 2, 1])], "long", "stress") == 1.0

    def test_misaligned_counts_in_denominator(self):
        good = pair([1, 0], [1, 0])
        bad = pair([1, 0, 1], [1, 1])
        assert coexistence([good, bad], "long", "stress") == 0.5
        assert coexistence([good, bad], "long", "stress", aligned_only=True) == 1.0

    def test_no_long_notes_contributes_zero(self):
        assert coexistence([pair([0, 0], [1, 1]), pair([1], [1])], "long", "stress") == 0.5

    def test_all_misaligned_aligned_only(self):
        assert coexistence([pair([1], [1, 1])], "long", "stress", aligned_only=True) == 0.0

    def test_errors(self):
        with pytest.raises(ValueError):
            coexistence([], "long", "stress")
        with pytest.raises(ValueError):
            coexistence([pair([1], [1])], "stress", "long")

    def test_hand_built_six_notes(self):
        p = AlignedPair.from_labels(
            long=[1, 1, 0, 1, 0, 0],
            peak=[0, 1, 0, 0, 1, 0],
            stress=[1, 0, 1, 2, 0, 0],
            importance=[2, 0, 1, 1, 1, 0],
            vowel=[0, 1, 2, 2, 0, 1],
        )
        rep = compatibility_suite([p])
        assert rep.dur_str == pytest.approx(200 / 3)
        assert rep.peak_str == 0.0
        assert rep.dur_imp == pytest.approx(200 / 3)
        assert rep.peak_imp == 50.0
        assert rep.dur_vow == pytest.approx(200 / 3)
        for _, a, b in COMPAT_PAIRS:
            assert coexistence([p], a, b) == pytest.approx(coexistence_oracle([p], a, b), abs=1e-15)

    @pytest.mark.parametrize("aligned_only", [False, True])
    def test_random_pairs_against_oracle(self, aligned_only):
        pairs = random_pairs(np.random.default_rng(17), 1000)
        for _, a, b in COMPAT_PAIRS:
            got = coexistence(pairs, a, b, aligned_only)
            assert 0.0 <= got <= 1.0
            assert abs(got - coexistence_oracle(pairs, a, b, aligned_only)) <= 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_permutation_invariant(self, seed):
        rng = np.random.default_rng(seed)
        pairs = random_pairs(rng, 40)
        shuffled = [pairs[i] for i in rng.permutation(len(pairs))]
        for _, a, b in COMPAT_PAIRS:
            assert coexistence(pairs, a, b) == coexistence(shuffled, a, b)


class TestAccuracy:
    def test_line_count(self):
        assert line_count_accuracy([2, 3, 4, 4], [2, 3, 4, 4]) == 100.0
        assert line_count_accuracy([2, 3, 4, 5], [2, 3, 4, 4]) == 75.0

    def test_line_count_length_mismatch(self):
        with pytest.raises(ValueError):
            line_count_accuracy([1, 2], [1])

    def test_syllables_one_wrong_line(self, lex):
        out = P(["hello world"] * 9 + ["hello"])
        assert syllable_accuracy([out], [[3] * 10], lex) == 90.0

    def test_syllables_missing_and_extra_lines(self, lex):
        assert syllable_accuracy([P(["hello world"])], [[3, 3]], lex) == 50.0
        assert syllable_accuracy([P(["hello world", "love"])], [[3]], lex) == 50.0

    def test_full_marks_iff_all_lines_match(self, lex):
        outs = [P(["hello world", "love me"]), P(["night"])]
        assert syllable_accuracy(outs, [[3, 2], [1]], lex) == 100.0
        assert syllable_accuracy(outs, [[3, 2], [2]], lex) < 100.0


def onehot(labels):
    return np.eye(3)[labels]


class TestMultitaskLoss:
    def test_zero_case(self):
        y = [0, 2, 1]
        assert multitask_loss([0, 0, 0], onehot(y), onehot(y), onehot(y), y, y, y) == 0.0

    def test_equals_token_nll_when_classifiers_perfect(self):
        y = [1, 1]
        assert multitask_loss([0.3, 0.5], onehot(y), onehot(y), onehot(y), y, y, y) == 0.4

    def test_hand_arithmetic(self):
        def row(ce):
            p = math.exp(-ce)
            return [[p, (1 - p) / 2, (1 - p) / 2]]
        got = multitask_loss([0.7], row(0.1), row(0.2), row(0.3), [0], [0], [0])
        assert abs(got - 1.3) <= 1e-12

    def test_uniform_predictions(self):
        u = np.full((4, 3), 1 / 3)
        y = [0, 1, 2, 0]
        assert abs(multitask_loss(np.zeros(4), u, u, u, y, y, y) - 3 * math.log(3)) <= 1e-12

    def test_raising_gold_probability_lowers_loss(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            n = int(rng.integers(1, 6))
            preds = [rng.dirichlet(np.ones(3), n) for _ in range(3)]
            gold = [rng.integers(0, 3, n) for _ in range(3)]
            nll = rng.random(n)
            base = multitask_loss(nll, *preds, *gold)
            k, j = int(rng.integers(0, 3)), int(rng.integers(0, n))
            bumped = [p.copy() for p in preds]
            row = bumped[k][j]
            g = gold[k][j]
            new = row[g] + (1 - row[g]) * rng.uniform(0.05, 0.95)
            others = np.delete(np.arange(3), g)
            row[others] *= (1 - new) / row[others].sum()
            row[g] = new
            assert multitask_loss(nll, *bumped, *gold) < base

    def test_shape_mismatch(self):
        y = [0, 1]
        with pytest.raises(ValueError):
            multitask_loss([0.1], onehot(y), onehot(y), onehot(y), y, y, y)

    def test_unnormalized_rows(self):
        bad = [[0.5, 0.5, 0.5]]
        with pytest.raises(ValueError):
            multitask_loss([0.0], bad, onehot([0]), onehot([0]), [0], [0], [0])


class TestReports:
    REP = CompatReport(80.0, 70.0, 60.0, 50.0, 40.0, line_count=100.0, line_len=100.0, ppl=12.3456)

    def test_csv_columns(self):
        header, row = report_csv([("gold", self.REP)]).splitlines()
        assert header.split(",") == ["Model", *TABLE_COLUMNS]
        assert row == "gold,12.35,100.00,100.00,80.00,70.00,60.00,50.00,40.00"

    def test_markdown_columns(self):
        lines = report_markdown([("gold", self.REP)]).splitlines()
        assert [c.strip() for c in lines[0].strip("|").split("|")] == ["Model", *TABLE_COLUMNS]
        assert len(lines) == 3

    def test_missing_values_render_as_dash(self):
        rep = CompatReport(1.0, 2.0, 3.0, 4.0, 5.0)
        assert report_csv([("x", rep)]).splitlines()[1].startswith("x,-,-,-,")
