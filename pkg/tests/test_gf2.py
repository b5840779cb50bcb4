"""Bit-packed GF(2) matrix type: conversions, rank, Hadamard product."""

import numpy as np
import pytest

from hadex import gf2

EXAMPLE_WORD = 0x127F  # rows 1111/1110/0100/1000
EXAMPLE_ROWS = [[1, 1, 1, 1], [1, 1, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]


def naive_rank_mod2(arr) -> int:
    """Independent oracle: textbook row reduction on an integer array mod 2."""
    m = np.array(arr, dtype=np.int64) % 2
    rank = 0
    for col in range(4):
        pivots = np.nonzero(m[rank:, col])[0]
        if not len(pivots):
            continue
        piv = rank + pivots[0]
        m[[rank, piv]] = m[[piv, rank]]
        for r in range(4):
            if r != rank and m[r, col]:
                m[r] = (m[r] + m[rank]) % 2
        rank += 1
    return rank


class TestConversions:
    def test_identity_packs_to_8421(self):
        assert gf2.from_rows(np.eye(4, dtype=int)) == 0x8421

    def test_example_rows_pack_to_127f(self):
        assert gf2.from_rows(EXAMPLE_ROWS) == EXAMPLE_WORD

    def test_000f_unpacks_to_first_row_of_ones(self):
        rows = gf2.to_rows(0x000F)
        assert rows.tolist() == [[1, 1, 1, 1], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]

    def test_round_trip_all_words(self):
        for m in range(gf2.WORD_COUNT):
            assert gf2.from_rows(gf2.to_rows(m)) == m

    def test_entry_matches_bit_layout(self):
        rng = np.random.default_rng(1)
        for m in rng.integers(0, gf2.WORD_COUNT, size=200):
            m = int(m)
            for r in range(4):
                for c in range(4):
                    assert gf2.entry(m, r, c) == (m >> (4 * r + c)) & 1

    def test_from_rows_rejects_non_binary(self):
        bad = np.eye(4, dtype=int)
        bad[0, 0] = 2
        with pytest.raises(ValueError):
            gf2.from_rows(bad)
        with pytest.raises(ValueError):
            gf2.from_rows(np.full((4, 4), 0.5))

    def test_from_rows_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            gf2.from_rows(np.zeros((3, 4), dtype=int))

    def test_hex_round_trip(self):
        assert gf2.to_hex(EXAMPLE_WORD) == "127f"
        assert gf2.from_hex("127f") == EXAMPLE_WORD
        assert gf2.from_hex(gf2.to_hex(0)) == 0

    def test_word_range_checked(self):
        with pytest.raises(ValueError):
            gf2.rank_gf2(gf2.WORD_COUNT)
        with pytest.raises(ValueError):
            gf2.to_rows(-1)


class TestRank:
    def test_zero_matrix(self):
        assert gf2.rank_gf2(0x0000) == 0

    def test_identity(self):
        assert gf2.rank_gf2(0x8421) == 4

    def test_all_ones(self):
        assert gf2.rank_gf2(0xFFFF) == 1

    def test_example_word_is_full_rank(self):
        assert gf2.rank_gf2(EXAMPLE_WORD) == 4

    def test_agrees_with_naive_oracle_on_all_words(self):
        for m in range(gf2.WORD_COUNT):
            assert gf2.rank_gf2(m) == naive_rank_mod2(gf2.to_rows(m)), hex(m)

    def test_invariant_under_permutations_and_transpose(self):
        rng = np.random.default_rng(7)
        for m in rng.integers(0, gf2.WORD_COUNT, size=1000):
            rows = gf2.to_rows(int(m))
            r = gf2.rank_gf2(int(m))
            rp = rng.permutation(4)
            cp = rng.permutation(4)
            assert gf2.rank_gf2(gf2.from_rows(rows[rp])) == r
            assert gf2.rank_gf2(gf2.from_rows(rows[:, cp])) == r
            assert gf2.rank_gf2(gf2.from_rows(rows.T)) == r


class TestHadamard:
    def test_idempotent(self):
        rng = np.random.default_rng(2)
        for m in rng.integers(0, gf2.WORD_COUNT, size=50):
            assert gf2.hadamard(int(m), int(m)) == int(m)

    def test_all_ones_is_identity_element(self):
        rng = np.random.default_rng(3)
        for m in rng.integers(0, gf2.WORD_COUNT, size=50):
            assert gf2.hadamard(int(m), gf2.ALL_ONES) == int(m)

    def test_disjoint_supports_vanish(self):
        assert gf2.hadamard(0x8421, 0xFFFF ^ 0x8421) == 0x0000

    def test_schur_rank_bound_exhaustive(self, rank_table):
        # A violation needs rank(a & b) > rank(a) * rank(b); the product rank
        # never exceeds 4, so pairs with both ranks >= 2 cannot violate.
        # Checking every pair with a rank <= 1 factor therefore covers all
        # 2^32 ordered pairs exactly.
        ranks = rank_table.ranks.astype(np.int64)
        words = np.arange(gf2.WORD_COUNT, dtype=np.uint16)
        low = words[ranks <= 1]
        for a in low:
            bound = ranks[a] * ranks
            products = a & words
            assert (ranks[products] <= bound).all(), hex(int(a))


class TestCountOnes:
    def test_extremes(self):
        assert gf2.count_ones(0x0000) == 0
        assert gf2.count_ones(0xFFFF) == 16

    def test_example_word_has_nine_ones(self):
        assert gf2.count_ones(EXAMPLE_WORD) == 9

    def test_matches_row_sum(self):
        rng = np.random.default_rng(4)
        for m in rng.integers(0, gf2.WORD_COUNT, size=200):
            assert gf2.count_ones(int(m)) == int(gf2.to_rows(int(m)).sum())
