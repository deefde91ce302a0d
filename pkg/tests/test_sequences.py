from collections import Counter

import pytest

from constants import SequenceSource, SpacingKind
from exceptions import DegenerateModulus, DegenerateWindow, WindowOutOfRange
from numtheory import euler_phi, factorize, primes_from, quadratic_residues, small_primes
from sequences import (
    ParityWord,
    Window,
    legendre_sequence,
    positions_to_parity_word,
    pr_parity_word,
    pr_spacings,
    qr_parity_word,
    qr_spacings,
    spacings,
    window_positions,
    window_pr_positions,
    window_qr_positions,
)

PRIMES_5_TO_200 = [p for p in small_primes(200) if p >= 5]


class TestLegendreSequence:
    @pytest.mark.parametrize(
        "p, expected",
        [(3, (0, 1, 0)), (5, (0, 1, 0, 0, 1)), (7, (0, 1, 1, 0, 1, 0, 0))],
    )
    def test_examples(self, p, expected):
        word = legendre_sequence(p)
        assert word.bits == expected
        assert word.source is SequenceSource.LEGENDRE

    @pytest.mark.parametrize("p", [p for p in small_primes(300) if p > 2])
    def test_half_ones(self, p):
        assert sum(legendre_sequence(p).bits) == (p - 1) // 2


class TestParityWords:
    @pytest.mark.parametrize("p, expected", [(5, "1"), (7, "10"), (11, "0110")])
    def test_qr_examples(self, p, expected):
        assert qr_parity_word(p).as_bitstring() == expected

    @pytest.mark.parametrize("p, expected", [(7, "0"), (11, "011"), (13, "010")])
    def test_pr_examples(self, p, expected):
        assert pr_parity_word(p).as_bitstring() == expected

    def test_degenerate_moduli(self):
        with pytest.raises(DegenerateModulus):
            qr_parity_word(3)
        with pytest.raises(DegenerateModulus):
            pr_parity_word(3)
        with pytest.raises(DegenerateModulus):
            pr_spacings(2)

    @pytest.mark.parametrize("p", [p for p in small_primes(400) if p >= 5])
    def test_length_laws(self, p):
        assert len(qr_parity_word(p)) == (p - 3) // 2
        assert len(pr_parity_word(p)) == euler_phi(factorize(p - 1)) - 1

    @pytest.mark.parametrize("p", [p for p in small_primes(400) if p >= 5])
    def test_spacing_sum_telescopes(self, p):
        assert sum(qr_spacings(p)) == quadratic_residues(p)[-1] - 1

    def test_spacings_keep_full_precision(self):
        assert spacings([1, 3, 4, 5, 9]) == [2, 1, 1, 4]
        assert pr_spacings(13) == [4, 1, 4]

    def test_full_words_carry_no_window(self):
        with pytest.raises(ValueError):
            ParityWord((1,), SequenceSource.QR_FULL, 5, Window(1, 2))
        with pytest.raises(ValueError):
            ParityWord((1,), SequenceSource.QR_WINDOW, 5)

    @pytest.mark.parametrize("p", primes_from(7919, 5))
    def test_qr_spacing_two_about_half_as_common_as_one(self, p):
        counts = Counter(qr_spacings(p))
        assert 0.35 <= counts[2] / counts[1] <= 0.65


class TestWindows:
    @pytest.mark.parametrize(
        "p, start, size, expected",
        [(11, 1, 10, [1, 3, 4, 5, 9]), (11, 3, 3, [1, 2, 3]), (7, 5, 2, [])],
    )
    def test_qr_positions(self, p, start, size, expected):
        assert window_qr_positions(p, start, size) == expected

    @pytest.mark.parametrize(
        "p, start, size, expected",
        [(11, 1, 10, [2, 6, 7, 8]), (13, 6, 3, [1, 2]), (7, 1, 2, [])],
    )
    def test_pr_positions(self, p, start, size, expected):
        assert window_pr_positions(p, start, size, factorize(p - 1)) == expected

    def test_dispatch(self):
        assert window_positions(13, 6, 3, SpacingKind.PR) == [1, 2]
        assert window_positions(11, 3, 3, SpacingKind.QR) == [1, 2, 3]

    @pytest.mark.parametrize("start, size", [(0, 3), (9, 3), (1, 11)])
    def test_out_of_range(self, start, size):
        with pytest.raises(WindowOutOfRange):
            window_qr_positions(11, start, size)

    def test_window_too_small(self):
        with pytest.raises(ValueError):
            window_qr_positions(11, 1, 1)

    @pytest.mark.parametrize(
        "positions, expected",
        [([1, 3, 4, 5, 9], (0, 1, 1, 0)), ([2, 6, 7, 8], (0, 1, 1)), ([1, 2], (1,))],
    )
    def test_positions_to_parity_word(self, positions, expected):
        word = positions_to_parity_word(positions, SequenceSource.QR_WINDOW, 11, Window(1, 10))
        assert word.bits == expected
        assert len(word) == len(positions) - 1

    @pytest.mark.parametrize("positions", [[], [4]])
    def test_degenerate_window(self, positions):
        with pytest.raises(DegenerateWindow) as excinfo:
            positions_to_parity_word(positions, SequenceSource.QR_WINDOW, 7, Window(5, 2))
        assert excinfo.value.hits == len(positions)
        assert excinfo.value.start == 5

    @pytest.mark.parametrize("p", PRIMES_5_TO_200)
    def test_full_window_matches_direct_words(self, p):
        window = Window(1, p - 1)
        qr = positions_to_parity_word(window_qr_positions(p, 1, p - 1), SequenceSource.QR_WINDOW, p, window)
        assert qr.bits == qr_parity_word(p).bits
        fpm1 = factorize(p - 1)
        pr = positions_to_parity_word(window_pr_positions(p, 1, p - 1, fpm1), SequenceSource.PR_WINDOW, p, window)
        assert pr.bits == pr_parity_word(p, fpm1).bits
