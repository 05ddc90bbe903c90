"""Codebook delay evaluation, metrics, and comparison reports."""
from __future__ import annotations

import json

import pytest

from cacforge.bus_model import BusParams
from cacforge.classification import ClassTables
from cacforge.codebook import (ClassicCodeFamily, Codebook, Codeword,
                               ConstraintConfig, build_codebook,
                               classic_codebook, prune_iolc)
from cacforge.errors import ConfigError, WidthError
from cacforge.evaluation import (codebook_worst_delay, constraint_delay_ceiling,
                                 metrics, pair_wire_delays, per_wire_csv,
                                 report, report_json, summary_csv)

C21 = ConstraintConfig(2, 1)


@pytest.fixture(scope="module")
def tables() -> ClassTables:
    return ClassTables.build()


def _books(n: int) -> tuple[Codebook, Codebook, Codebook]:
    unpruned = build_codebook(C21, n)
    return (prune_iolc(unpruned), unpruned,
            classic_codebook(ClassicCodeFamily.OLC, n, 0))


# ------------------------------------------------------------ pair delays


def test_uniform_transition_hits_the_class_floor(tables: ClassTables) -> None:
    u, v = Codeword.from_int(0, 5), Codeword.from_int(31, 5)
    assert pair_wire_delays(u, v, tables=tables) == (1.08,) * 5


def test_identical_words_report_all_zeros(tables: ClassTables) -> None:
    u = Codeword.from_int(13, 6)
    assert pair_wire_delays(u, u, tables=tables) == (0.0,) * 6


def test_alternating_flip_peaks_on_the_middle_wire(tables: ClassTables) -> None:
    u = Codeword.from_text("01010")
    v = Codeword.from_text("10101")
    delays = pair_wire_delays(u, v, tables=tables)
    assert delays == (20.05, 55.28, 58.52, 55.28, 20.05)


def test_pair_delays_validation(tables: ClassTables) -> None:
    with pytest.raises(WidthError):
        pair_wire_delays(Codeword.from_int(0, 4), Codeword.from_int(1, 4),
                         tables=tables)
    with pytest.raises(WidthError):
        pair_wire_delays(Codeword.from_int(0, 5), Codeword.from_int(0, 6),
                         tables=tables)


def test_params_must_match_supplied_tables(tables: ClassTables) -> None:
    u, v = Codeword.from_int(0, 5), Codeword.from_int(31, 5)
    with pytest.raises(ConfigError):
        pair_wire_delays(u, v, params=BusParams(lam=5.0), tables=tables)


# ------------------------------------------------------------ worst delays


def test_two_word_book_worst_is_the_evaluated_transition(tables: ClassTables) -> None:
    # both transitions of {00000, 11111} are all-up / all-down, whose
    # windows sit at the class-0 floor of 1.08, not at the 1.55 class-0
    # ceiling; the ceiling still bounds the result
    book = Codebook(5, (Codeword.from_int(0, 5), Codeword.from_int(31, 5)),
                    "pair")
    rep = codebook_worst_delay(book, tables=tables)
    assert rep.worst_delay_ps == pytest.approx(1.08, abs=1e-9)
    assert rep.wire_worst_ps == (1.08,) * 5
    side_ceiling = max(hi for _, _, hi in tables.wire1.intervals()[:1])
    assert side_ceiling == pytest.approx(1.55, abs=1e-9)
    assert rep.worst_delay_ps <= side_ceiling


def test_report_structure(tables: ClassTables) -> None:
    book = build_codebook(C21, 6)
    rep = codebook_worst_delay(book, tables=tables)
    assert rep.method == "pairs"
    assert rep.width == 6
    assert rep.worst_delay_ps == max(rep.wire_worst_ps)
    assert rep.wire_worst_ps[rep.worst_wire - 1] == rep.worst_delay_ps
    assert rep.worst_pair == rep.wire_pairs[rep.worst_wire - 1]
    for pair in rep.wire_pairs:
        assert pair is None or (pair[0] in book and pair[1] in book)


def test_report_validation(tables: ClassTables) -> None:
    solo = Codebook(5, (Codeword.from_int(0, 5),), "solo")
    with pytest.raises(ConfigError):
        codebook_worst_delay(solo, tables=tables)
    narrow = build_codebook(C21, 4)
    with pytest.raises(WidthError):
        codebook_worst_delay(narrow, tables=tables)


def test_never_switching_wires_report_zero_and_no_pair(tables: ClassTables) -> None:
    book = Codebook(5, (Codeword.from_int(0, 5), Codeword.from_int(3, 5)),
                    "custom")
    rep = codebook_worst_delay(book, tables=tables)
    assert rep.wire_worst_ps[:3] == (0.0, 0.0, 0.0)
    assert rep.wire_pairs[:3] == (None, None, None)
    assert rep.wire_worst_ps[3] == pytest.approx(4.54, abs=1e-9)
    lines = per_wire_csv(rep).splitlines()
    assert lines[0] == "wire_index,worst_delay_ps,from_word,to_word"
    assert lines[1] == "1,0.000000,-,-"
    assert lines[4] == "4,4.540000,00000,00011"


def test_window_composition_matches_pair_enumeration(tables: ClassTables) -> None:
    book = build_codebook(ConstraintConfig(3, 1), 9)
    by_pairs = codebook_worst_delay(book, tables=tables)
    by_windows = codebook_worst_delay(book, tables=tables, pair_limit=1)
    assert by_windows.method == "windows"
    assert by_windows.wire_worst_ps == by_pairs.wire_worst_ps
    assert by_windows.worst_delay_ps == by_pairs.worst_delay_ps
    for pair in by_windows.wire_pairs:
        assert pair is None or (pair[0] in book and pair[1] in book)


def test_worst_delay_dominance_chain(tables: ClassTables) -> None:
    for n in (10, 16):
        pruned, unpruned, olc = _books(n)
        w_pruned = codebook_worst_delay(pruned, tables=tables).worst_delay_ps
        w_unpruned = codebook_worst_delay(unpruned, tables=tables).worst_delay_ps
        w_olc = codebook_worst_delay(olc, tables=tables).worst_delay_ps
        assert w_pruned < w_unpruned < w_olc
        assert w_pruned == pytest.approx(9.70, abs=1e-9)
        assert w_unpruned == pytest.approx(13.11, abs=1e-9)
        assert w_olc == pytest.approx(14.07, abs=1e-9)


def test_pruning_improves_the_side_wires(tables: ClassTables) -> None:
    for n in (10, 16):
        pruned, unpruned, _ = _books(n)
        rep_p = codebook_worst_delay(pruned, tables=tables)
        rep_u = codebook_worst_delay(unpruned, tables=tables)
        side = (0, 1, n - 2, n - 1)
        worst_p = max(rep_p.wire_worst_ps[k] for k in side)
        worst_u = max(rep_u.wire_worst_ps[k] for k in side)
        assert worst_p <= worst_u


def test_worst_delay_never_exceeds_the_class_ceiling(tables: ClassTables) -> None:
    for key in ((2, 1), (3, 1), (4, 2), (5, 3)):
        constraint = ConstraintConfig(*key)
        book = build_codebook(constraint, 10)
        rep = codebook_worst_delay(book, tables=tables)
        assert rep.worst_delay_ps <= constraint_delay_ceiling(constraint, tables)


# ----------------------------------------------------------------- metrics


def test_metrics_sizes_and_bits(tables: ClassTables) -> None:
    olc5 = classic_codebook(ClassicCodeFamily.OLC, 5, 0)
    m = metrics(prune_iolc(build_codebook(C21, 5)), olc5, tables=tables)
    assert (m.size, m.data_bits) == (4, 2)
    olc13 = classic_codebook(ClassicCodeFamily.OLC, 13, 0)
    m = metrics(build_codebook(C21, 13), olc13, tables=tables)
    assert (m.size, m.data_bits) == (32, 5)
    olc16 = classic_codebook(ClassicCodeFamily.OLC, 16, 0)
    m = metrics(olc16, olc16, tables=tables)
    assert (m.size, m.data_bits) == (151, 7)
    assert m.gain == pytest.approx(1.0)


def test_metrics_invariants(tables: ClassTables) -> None:
    pruned, _, olc = _books(10)
    m = metrics(pruned, olc, tables=tables)
    assert 0.0 < m.rate <= 1.0
    assert m.rate == pytest.approx(0.3)
    assert m.throughput == pytest.approx(m.rate / m.worst_delay_ps)
    assert m.gain > 1.0


def test_metrics_validation(tables: ClassTables) -> None:
    with pytest.raises(WidthError):
        metrics(build_codebook(C21, 6), build_codebook(C21, 7), tables=tables)
    solo = Codebook(5, (Codeword.from_int(0, 5),), "solo")
    with pytest.raises(ConfigError):
        metrics(solo, build_codebook(C21, 5), tables=tables)


def test_model_gain_exceeds_one_when_payload_widths_match(tables: ClassTables) -> None:
    # the evaluated worst delays are width-independent (9.70 vs 14.07), so
    # the throughput ratio is decided by the payload bits: strictly above
    # one exactly at the widths where the pruned book gives up no bits
    for n in (5, 8, 9, 10, 11, 12, 15, 16):
        pruned, _, olc = _books(n)
        assert metrics(pruned, olc, tables=tables).gain > 1.0
    for n in (6, 7, 13, 14):
        pruned, _, olc = _books(n)
        assert metrics(pruned, olc, tables=tables).gain == pytest.approx(
            (14.07 / 9.70) * 2 / 3)


@pytest.mark.xfail(strict=True, reason=(
    "with model-evaluated delays the pruned book's throughput gain over the "
    "classic one-lambda book drops below 1 at n in {6, 7, 13, 14}, where it "
    "holds one data bit less; the published all-widths claim rests on "
    "per-width circuit simulations whose delay ratios grow to ~1.6"))
def test_model_gain_exceeds_one_at_every_width(tables: ClassTables) -> None:
    for n in range(5, 17):
        pruned, _, olc = _books(n)
        assert metrics(pruned, olc, tables=tables).gain > 1.0


# ----------------------------------------------------------------- reports


def test_comparison_report_orders_and_baselines(tables: ClassTables) -> None:
    comp = report(list(_books(10)), tables=tables)
    assert [e.label for e in comp.entries] == ["IOLC", "C2,1C", "OLC"]
    assert comp.entries[-1].gain == pytest.approx(1.0)
    assert comp.entries[0].gain > comp.entries[1].gain > 1.0
    assert comp.entries[0].worst_delay_ps < comp.entries[1].worst_delay_ps


def test_report_supports_mixed_widths(tables: ClassTables) -> None:
    comp = report([*_books(10), *_books(5)], tables=tables)
    assert [e.width for e in comp.entries] == [10, 10, 10, 5, 5, 5]
    assert comp.entries[2].gain == pytest.approx(1.0)
    assert comp.entries[5].gain == pytest.approx(1.0)


def test_empty_report(tables: ClassTables) -> None:
    comp = report([], tables=tables)
    assert comp.entries == ()
    assert summary_csv(comp).splitlines() == [
        "label,width,size,data_bits,rate,worst_delay_ps,throughput,gain"]


def test_summary_csv_shape(tables: ClassTables) -> None:
    comp = report(list(_books(10)), tables=tables)
    lines = summary_csv(comp).splitlines()
    assert len(lines) == 4
    assert lines[1].startswith("IOLC,10,12,3,0.300000,9.700000,")
    assert lines[2].startswith('"C2,1C",10,17,4,')
    assert lines[3].startswith("OLC,10,28,4,0.400000,14.070000,")
    assert lines[3].endswith(",1.000000")


def test_per_wire_csv_shape(tables: ClassTables) -> None:
    rep = codebook_worst_delay(_books(10)[0], tables=tables)
    lines = per_wire_csv(rep).splitlines()
    assert len(lines) == 11
    assert all(line.split(",")[0] == str(k) for k, line in enumerate(lines[1:], 1))


def test_json_report_is_deterministic_and_faithful(tables: ClassTables) -> None:
    books = list(_books(10))
    first = report_json(report(books, tables=tables))
    second = report_json(report(books, tables=tables))
    assert first == second
    payload = json.loads(first)
    assert payload["params"] == {"tau0_ps": 1.42, "lam": 12.24}
    entry = payload["entries"][0]
    assert entry["label"] == "IOLC"
    assert len(entry["wires"]) == 10
    assert entry["wires"][0]["wire_index"] == 1
    assert entry["worst_delay_ps"] == pytest.approx(9.70)
