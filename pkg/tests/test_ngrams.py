"""n-gram counting, table merging, choose_n, and CSV table round trips."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zipfunits import (
    IncompatibleTables,
    MalformedRecord,
    NgramTable,
    TokenRecord,
    UtteranceRecord,
    ZeroLength,
    char_sequence,
    choose_n,
    count_char_ngrams,
    count_unit_ngrams,
    count_words,
    merge,
    read_table_csv,
    write_table_csv,
)
from zipfunits.ngrams import parse_item, render_item


def rec(i, units):
    return UtteranceRecord(str(i), units, None)


def test_unit_unigrams():
    table = count_unit_ngrams([rec(0, [5, 5, 9]), rec(1, [9])], 1)
    assert table.counts == {(5,): 2, (9,): 2}
    assert table.total == 4
    assert table.n == 1 and table.kind == "unit"


def test_unit_bigrams_stay_within_utterances():
    # no window spans the boundary between the two records
    table = count_unit_ngrams([rec(0, [1, 2, 3]), rec(1, [3, 1])], 2)
    assert table.counts == {(1, 2): 1, (2, 3): 1, (3, 1): 1}
    assert table.total == 3


def test_short_utterances_contribute_nothing():
    table = count_unit_ngrams([rec(0, [7]), rec(1, [])], 2)
    assert table.counts == {} and table.total == 0


def test_char_sequence_joining_and_charset():
    assert char_sequence(["ab", "cd"]) == "ab cd"
    assert char_sequence(["ab", "cd"], joiner=None) == "abcd"
    assert char_sequence(["ab", "cd"], charset="abc ", joiner=" ") == "ab c"
    with pytest.raises(ValueError):
        char_sequence(["a"], joiner="--")
    with pytest.raises(ValueError):
        char_sequence(["a"], charset="abc", joiner=" ")


def test_char_bigrams():
    table = count_char_ngrams([TokenRecord("x", ["ab", "ba"], None)], 2)
    # stream "ab ba": windows ab, "b ", " b", ba
    assert table.counts == {("a", "b"): 1, ("b", " "): 1, (" ", "b"): 1, ("b", "a"): 1}
    assert table.total == 4
    assert table.kind == "character"


def test_count_words():
    table = count_words(
        [TokenRecord("x", ["the", "cat"], None), TokenRecord("y", ["the"], None)]
    )
    assert table.counts == {("the",): 2, ("cat",): 1}
    assert table.total == 3
    assert table.kind == "word" and table.n == 1


@pytest.mark.parametrize(
    "ref,target,expect",
    [
        (10, 16, 2),
        (10, 51, 6),
        (10, 57, 6),
        (10, 19, 2),
        (10, 89, 9),
        (10, 90, 9),
        (7, 7, 1),
        (100, 1, 1),
    ],
)
def test_choose_n_rounds_up(ref, target, expect):
    assert choose_n(ref, target) == expect


def test_choose_n_rejects_zero_lengths():
    with pytest.raises(ZeroLength):
        choose_n(0, 5)
    with pytest.raises(ZeroLength):
        choose_n(5, 0)


def test_merge_adds_counts():
    a = NgramTable(1, "unit", {(1,): 2, (2,): 1}, 3)
    b = NgramTable(1, "unit", {(2,): 4}, 4)
    m = merge(a, b)
    assert m.counts == {(1,): 2, (2,): 5}
    assert m.total == 7


def test_merge_rejects_mismatches():
    a = NgramTable(1, "unit", {(1,): 1}, 1)
    with pytest.raises(IncompatibleTables):
        merge(a, NgramTable(2, "unit", {(1, 2): 1}, 1))
    with pytest.raises(IncompatibleTables):
        merge(a, NgramTable(1, "word", {("x",): 1}, 1))


def test_render_parse_items():
    assert render_item((3, 50, 200), "unit") == "3-50-200"
    assert parse_item("3-50-200", "unit", 3) == (3, 50, 200)
    assert render_item(("a", "b"), "character") == "ab"
    assert parse_item("ab", "character", 2) == ("a", "b")
    assert render_item(("cat",), "word") == "cat"
    assert parse_item("cat", "word", 1) == ("cat",)


def test_table_csv_roundtrip(tmp_path):
    table = count_unit_ngrams([rec(0, [1, 2, 1, 2]), rec(1, [2, 2, 2])], 2)
    path = tmp_path / "t.csv"
    write_table_csv(table, path)
    back = read_table_csv(path)
    assert back.counts == table.counts
    assert back.total == table.total
    assert (back.n, back.kind) == (table.n, table.kind)


def test_table_csv_row_order(tmp_path):
    table = NgramTable(1, "unit", {(9,): 2, (1,): 2, (5,): 7}, 11)
    path = tmp_path / "t.csv"
    write_table_csv(table, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "#n=1,kind=unit,total=11"
    assert lines[1] == "item,count"
    # descending count; ties broken by ascending item
    assert lines[2:] == ["5,7", "1,2", "9,2"]


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("item,count\n1,2\n", "header"),
        ("#n=1,kind=unit,total=2\nwrong,header\n", "item,count"),
        ("#n=1,kind=bogus,total=2\nitem,count\n1,2\n", "kind"),
        ("#n=1,kind=unit,total=2\nitem,count\n1,0\n", "positive"),
        ("#n=1,kind=unit,total=2\nitem,count\n1,1\n1,1\n", "duplicate"),
        ("#n=1,kind=unit,total=5\nitem,count\n1,2\n", "total"),
        ("#n=2,kind=unit,total=2\nitem,count\n1,2\n", "2-gram"),
        ("#n=1,kind=unit,total=2\nitem,count\nx,2\n", "bad row"),
    ],
)
def test_table_csv_rejects_malformed(tmp_path, text, fragment):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(MalformedRecord) as err:
        read_table_csv(path)
    assert fragment in str(err.value)


utterances = st.lists(
    st.lists(st.integers(min_value=0, max_value=30), max_size=12), max_size=12
)


@given(utterances, st.integers(min_value=1, max_value=4))
def test_window_total_matches_formula(seqs, n):
    records = [rec(i, u) for i, u in enumerate(seqs)]
    table = count_unit_ngrams(records, n)
    assert table.total == sum(max(0, len(u) - n + 1) for u in seqs)
    assert sum(table.counts.values()) == table.total
    assert all(len(item) == n for item in table.counts)


@given(utterances, st.integers(min_value=1, max_value=3), st.integers(0, 10))
def test_sharded_counting_equals_whole(seqs, n, split):
    records = [rec(i, u) for i, u in enumerate(seqs)]
    cut = min(split, len(records))
    whole = count_unit_ngrams(records, n)
    left = count_unit_ngrams(records[:cut], n)
    right = count_unit_ngrams(records[cut:], n)
    merged = merge(left, right)
    assert merged.counts == whole.counts
    assert merged.total == whole.total


@given(utterances, st.integers(min_value=1, max_value=3))
def test_csv_roundtrip_property(tmp_path_factory, seqs, n):
    table = count_unit_ngrams([rec(i, u) for i, u in enumerate(seqs)], n)
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    write_table_csv(table, path)
    back = read_table_csv(path)
    assert back.counts == table.counts and back.total == table.total
