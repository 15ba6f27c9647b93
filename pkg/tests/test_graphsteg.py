"""Huffman word coding, alpha/beta keying, series CSV."""

from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stegkit.errors import (
    AlphabetTooSmall,
    DanglingBits,
    MalformedCsv,
    NotDivisible,
    UnknownLetter,
)
from stegkit.graphsteg import (
    GraphKey,
    GraphSeries,
    HuffmanTable,
    build_table,
    decode_series,
    decode_value,
    encode_series,
    encode_word,
    letter_frequencies,
    parse_series,
    serialize_series,
)

# The worked-example code table used throughout: a valid full prefix code
# over the letters of "this is a test".
EXAMPLE_TABLE = HuffmanTable(
    {"t": "11", "s": "10", "i": "00", "h": "010", "a": "0110", "e": "0111"}
)


# ---------------------------------------------------------------------------
# Exhaustive-search oracle for optimal prefix codes (small alphabets)
# ---------------------------------------------------------------------------


def kraft_complete_length_multisets(n: int, max_len: int = 8):
    """All non-decreasing length vectors with sum(2**-l) exactly 1."""
    results = []

    def rec(k, min_len, remaining, acc):
        if k == 0:
            if remaining == 0:
                results.append(tuple(acc))
            return
        for length in range(min_len, max_len + 1):
            if Fraction(k, 2**length) < remaining:
                break  # even k copies of this cheapest length fall short
            piece = Fraction(1, 2**length)
            if piece <= remaining:
                acc.append(length)
                rec(k - 1, length, remaining - piece, acc)
                acc.pop()

    rec(n, 1, Fraction(1), [])
    return results


def optimal_weighted_length(counts) -> int:
    """Brute-force optimum: any optimal prefix code fills its tree, and the
    best assignment pairs big counts with short codes."""
    counts = sorted(counts, reverse=True)
    best = None
    for lengths in kraft_complete_length_multisets(len(counts)):
        cost = sum(c * l for c, l in zip(counts, sorted(lengths)))
        if best is None or cost < best:
            best = cost
    return best


def weighted_length(message: str, table: HuffmanTable) -> int:
    freqs = letter_frequencies(message)
    return sum(freqs[letter] * len(code) for letter, code in table.codes.items())


# ---------------------------------------------------------------------------
# Table construction
# ---------------------------------------------------------------------------


def test_example_message_frequencies():
    assert letter_frequencies("this is a test") == Counter(
        {"t": 3, "s": 3, "i": 2, "a": 1, "e": 1, "h": 1}
    )


def test_example_message_weighted_length_is_optimal():
    message = "this is a test"
    table = build_table(message)
    assert weighted_length(message, table) == 27
    assert optimal_weighted_length(letter_frequencies(message).values()) == 27
    # the worked-example table reaches the same optimum
    assert weighted_length(message, EXAMPLE_TABLE) == 27


def test_two_symbol_alphabet_gets_single_bit_codes():
    table = build_table("ab")
    assert sorted(len(c) for c in table.codes.values()) == [1, 1]


def test_build_table_is_deterministic():
    a = build_table("the quick brown fox jumps over the lazy dog")
    b = build_table("the quick brown fox jumps over the lazy dog")
    assert a.codes == b.codes


def test_build_table_needs_two_letters():
    with pytest.raises(AlphabetTooSmall):
        build_table("aaaa   aa")


@given(st.text(alphabet="abcdefgh", min_size=2, max_size=60).filter(lambda s: len(set(s)) >= 2))
@settings(max_examples=60, deadline=None)
def test_built_tables_are_valid_and_optimal(message):
    table = build_table(message)  # HuffmanTable validates prefix-freeness and Kraft
    counts = letter_frequencies(message)
    assert weighted_length(message, table) == optimal_weighted_length(counts.values())


def test_table_validation_rejects_non_prefix_free():
    with pytest.raises(ValueError):
        HuffmanTable({"a": "0", "b": "01", "c": "11"})


def test_table_validation_rejects_incomplete_tree():
    with pytest.raises(ValueError):
        HuffmanTable({"a": "0", "b": "10"})  # leaves 11 unused


# ---------------------------------------------------------------------------
# Word values and the leading-1 rule
# ---------------------------------------------------------------------------


def test_word_is_encodes_to_eighteen():
    assert encode_word("is", EXAMPLE_TABLE) == 18  # 1 + 00 + 10 read as binary


def test_word_t_encodes_to_seven():
    assert encode_word("t", EXAMPLE_TABLE) == 7  # 111


def test_word_a_encodes_to_twentytwo():
    assert encode_word("a", EXAMPLE_TABLE) == 22  # 10110


def test_eighteen_decodes_back_to_is():
    assert decode_value(18, EXAMPLE_TABLE) == "is"


def test_unknown_letter():
    with pytest.raises(UnknownLetter):
        encode_word("fish", EXAMPLE_TABLE)


def test_dangling_bits():
    # 2 is binary 10; removing the leading 1 leaves "0", which is no code
    with pytest.raises(DanglingBits):
        decode_value(2, EXAMPLE_TABLE)


def test_leading_one_preserves_leading_zeros():
    # "i" codes to 00; without framing, the decimal trip destroys it
    naive = int(EXAMPLE_TABLE["i"], 2)
    assert format(naive, "b") != EXAMPLE_TABLE["i"]  # 0 renders as "0", one zero lost
    framed = encode_word("i", EXAMPLE_TABLE)
    assert framed == 4  # binary 100
    assert decode_value(framed, EXAMPLE_TABLE) == "i"


@given(st.lists(st.sampled_from("tsihae"), min_size=1, max_size=8))
@settings(max_examples=60)
def test_word_round_trip_property(letters):
    word = "".join(letters)
    value = encode_word(word, EXAMPLE_TABLE)
    assert value >= 2  # never collides with the default separator
    assert decode_value(value, EXAMPLE_TABLE) == word


# ---------------------------------------------------------------------------
# Series coding with the alpha/beta key
# ---------------------------------------------------------------------------


def test_series_is_is_with_beta_five():
    key = GraphKey(EXAMPLE_TABLE, alpha=1, beta=5)
    series = encode_series("is is", key)
    assert [y for _, y in series.points] == [90, 5, 90]
    assert [x for x, _ in series.points] == [1, 2, 3]


def test_single_word_identity_scaling():
    key = GraphKey(EXAMPLE_TABLE)
    assert [y for _, y in encode_series("is", key).points] == [18]


def test_series_round_trip():
    key = GraphKey(EXAMPLE_TABLE, alpha=1, beta=7)
    message = "this is a test"
    assert decode_series(encode_series(message, key), key) == message


def test_wrong_beta_is_not_divisible():
    series = GraphSeries([(1, 90), (2, 5), (3, 90)])
    with pytest.raises(NotDivisible):
        decode_series(series, GraphKey(EXAMPLE_TABLE, alpha=1, beta=3))


def test_empty_series_decodes_to_empty_message():
    key = GraphKey(EXAMPLE_TABLE, beta=4)
    assert decode_series(GraphSeries([]), key) == ""
    assert encode_series("", key).points == []


def test_multiple_spaces_collapse():
    key = GraphKey(EXAMPLE_TABLE, beta=2)
    assert decode_series(encode_series("is   is", key), key) == "is is"


@st.composite
def alphabet_and_sentence(draw):
    letters = draw(st.lists(st.sampled_from("abcdefghijk"), min_size=2, max_size=6, unique=True))
    words = draw(
        st.lists(st.text(alphabet=letters, min_size=1, max_size=5), min_size=1, max_size=6)
    )
    corpus = "".join(letters) + "".join(words)
    return corpus, " ".join(words)


@given(alphabet_and_sentence(), st.integers(1, 50))
@settings(max_examples=60, deadline=None)
def test_full_pipeline_round_trip(corpus_sentence, beta):
    corpus, sentence = corpus_sentence
    key = GraphKey(build_table(corpus), alpha=1, beta=beta)
    series = encode_series(sentence, key)
    assert decode_series(series, key) == " ".join(sentence.split())
    # every point is divisible by beta and decodes under the key
    assert all(y % beta == 0 for _, y in series.points)


def test_key_json_round_trip():
    key = GraphKey(EXAMPLE_TABLE, alpha=1, beta=9)
    again = GraphKey.from_json(key.to_json())
    assert again == key


# ---------------------------------------------------------------------------
# CSV grammar
# ---------------------------------------------------------------------------


def test_serialize_single_point():
    assert serialize_series(GraphSeries([(1, 18)])) == "x,y\n1,18\n"


def test_serialize_with_title():
    text = serialize_series(GraphSeries([(1, 18)], title="monthly sales"))
    assert text == "# title: monthly sales\nx,y\n1,18\n"
    assert parse_series(text).title == "monthly sales"


def test_parse_round_trip():
    series = GraphSeries([(1, 90), (2, 5), (3, 90)], title="rainfall")
    assert parse_series(serialize_series(series)) == series


def test_parse_rejects_non_integer_cell():
    with pytest.raises(MalformedCsv):
        parse_series("x,y\n1,abc\n")


def test_parse_rejects_missing_header():
    with pytest.raises(MalformedCsv):
        parse_series("1,18\n")


def test_parse_rejects_bad_x_sequence():
    with pytest.raises(MalformedCsv):
        parse_series("x,y\n1,18\n3,5\n")


def test_parse_rejects_nonpositive_y():
    with pytest.raises(MalformedCsv):
        parse_series("x,y\n1,0\n")
