"""Enumerative codec: rank tables, unranking, membership."""
from __future__ import annotations

import pytest

from cacforge.codebook import (ClassicCodeFamily, Codeword, ConstraintConfig,
                               build_codebook, classic_codebook, iolc_size,
                               prune_iolc)
from cacforge.codec import RankTable, build_rank_table, decode, encode
from cacforge.errors import (ConfigError, MembershipError,
                             UnsupportedConstraintError, WidthError)

C21 = ConstraintConfig(2, 1)
C31 = ConstraintConfig(3, 1)


@pytest.fixture(scope="module")
def c31_n10() -> RankTable:
    return build_rank_table(C31, 10)


def test_totals_match_spec_examples(c31_n10: RankTable) -> None:
    assert build_rank_table(C21, 5).total == 6
    assert c31_n10.total == 28


def test_totals_match_built_books() -> None:
    for key in ((2, 1), (3, 1), (4, 2), (5, 3), (6, 4)):
        constraint = ConstraintConfig(*key)
        for parity in (0, 1):
            for n in range(1, 13):
                table = build_rank_table(constraint, n, parity)
                assert table.total == len(build_codebook(constraint, n, parity))


def test_totals_match_classic_books() -> None:
    for family in ClassicCodeFamily:
        for parity in (0, 1):
            for n in range(1, 13):
                table = build_rank_table(family, n, parity)
                assert table.total == len(classic_codebook(family, n, parity))


def test_totals_match_pruned_books() -> None:
    for n in range(5, 17):
        assert build_rank_table("IOLC", n).total == iolc_size(n)


def test_table_metadata(c31_n10: RankTable) -> None:
    assert c31_n10.subject == "C3,1C"
    assert c31_n10.width == 10
    assert c31_n10.parity == 0
    assert c31_n10.data_bits == 4
    assert build_rank_table("iolc", 5).data_bits == 2
    assert build_rank_table(ClassicCodeFamily.FPC, 6).parity is None


def test_root_counts_sum_to_total(c31_n10: RankTable) -> None:
    zero, one = c31_n10.counts[0, ()]
    assert zero + one == c31_n10.total
    assert all(z >= 0 and o >= 0 for z, o in c31_n10.counts.values())


def test_build_is_deterministic() -> None:
    assert build_rank_table(C21, 8) == build_rank_table(C21, 8)


def test_encode_zero_is_all_zeros(c31_n10: RankTable) -> None:
    assert encode(0, c31_n10).decimal == 0
    assert encode(0, build_rank_table("IOLC", 7)).decimal == 0
    assert encode(0, build_rank_table(ClassicCodeFamily.FOC, 6)).decimal == 0


def test_encode_walks_the_book_in_decimal_order(c31_n10: RankTable) -> None:
    book = build_codebook(C31, 10)
    produced = [encode(x, c31_n10).decimal for x in range(16)]
    assert produced == list(book.decimals[:16])
    assert produced == sorted(produced)


def test_encode_fourth_pruned_word_at_width_five() -> None:
    table = build_rank_table("IOLC", 5)
    assert str(encode(3, table)) == "11111"


def test_encode_range_errors(c31_n10: RankTable) -> None:
    with pytest.raises(ConfigError):
        encode(16, c31_n10)
    with pytest.raises(ConfigError):
        encode(-1, c31_n10)


def test_decode_all_zeros(c31_n10: RankTable) -> None:
    assert decode(Codeword.from_int(0, 10), c31_n10) == 0


def test_round_trips(c31_n10: RankTable) -> None:
    tables = [c31_n10,
              build_rank_table("IOLC", 10),
              build_rank_table(ClassicCodeFamily.FPC, 8),
              build_rank_table(ClassicCodeFamily.FTC, 7, parity=1),
              build_rank_table(C21, 16)]
    for table in tables:
        for data in range(1 << table.data_bits):
            assert decode(encode(data, table), table) == data


def test_every_codeword_decodes_to_its_index(c31_n10: RankTable) -> None:
    book = build_codebook(C31, 10)
    assert [decode(word, c31_n10) for word in book] == list(range(28))
    pruned = prune_iolc(build_codebook(C21, 6))
    table = build_rank_table("IOLC", 6)
    assert [decode(word, table) for word in pruned] == list(range(5))


def test_surplus_codewords_decode_but_are_never_encoded(c31_n10: RankTable) -> None:
    book = build_codebook(C31, 10)
    produced = {encode(x, c31_n10) for x in range(16)}
    for index, word in enumerate(book.words[16:], start=16):
        assert decode(word, c31_n10) == index
        assert word not in produced


def test_decode_rejects_non_members() -> None:
    with pytest.raises(MembershipError):
        decode(Codeword.from_text("01010"), build_rank_table(C21, 5))
    # 000001 survives the constraint but is cut by the prune
    with pytest.raises(MembershipError):
        decode(Codeword.from_text("000001"), build_rank_table("IOLC", 6))


def test_decode_rejects_width_mismatch(c31_n10: RankTable) -> None:
    with pytest.raises(WidthError):
        decode(Codeword.from_int(0, 9), c31_n10)


def test_trivial_constraint_encodes_identity() -> None:
    table = build_rank_table(ConstraintConfig(6, 4), 6)
    assert table.data_bits == 6
    for value in (0, 17, 63):
        assert encode(value, table).decimal == value


def test_narrow_constraint_tables_rank_the_reduced_books() -> None:
    table = build_rank_table(ConstraintConfig(4, 2), 4)
    book = build_codebook(ConstraintConfig(4, 2), 4)
    assert table.total == 10
    assert [decode(word, table) for word in book] == list(range(10))


def test_build_validation() -> None:
    with pytest.raises(WidthError):
        build_rank_table(C21, 0)
    with pytest.raises(ConfigError):
        build_rank_table(C21, 5, parity=2)
    with pytest.raises(UnsupportedConstraintError):
        build_rank_table(ConstraintConfig(0, 0), 5)
    with pytest.raises(UnsupportedConstraintError):
        build_rank_table("bogus", 5)
    with pytest.raises(UnsupportedConstraintError):
        build_rank_table("IOLC", 6, parity=1)
    with pytest.raises(WidthError):
        build_rank_table("IOLC", 4)
