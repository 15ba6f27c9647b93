"""Word-by-word graph steganography.

Each word of the secret message is Huffman-coded letter by letter, the bits
are concatenated, a leading 1 is prepended (so leading zeros survive the
trip through decimal), and the resulting integer is multiplied by a shared
scale factor beta. A separator value alpha (also scaled) stands between
words. The numbers are published as a harmless-looking (x, y) data series;
whoever holds the code table, alpha and beta reads the sentence back.

The leading 1 guarantees every word value is at least 2, so the default
alpha = 1 can never collide with a word.
"""

from __future__ import annotations

import heapq
import json
from collections import Counter
from dataclasses import dataclass

from .errors import (
    AlphabetTooSmall,
    DanglingBits,
    MalformedCsv,
    NotDivisible,
    UnknownLetter,
)


@dataclass(frozen=True)
class HuffmanTable:
    """Prefix-free letter -> bit-string map forming a full binary tree."""

    codes: dict[str, str]

    def __post_init__(self):
        if len(self.codes) < 2:
            raise AlphabetTooSmall("a prefix code needs at least two letters")
        kraft_num = 0
        max_len = max(len(c) for c in self.codes.values())
        for letter, code in self.codes.items():
            if len(letter) != 1 or letter == " ":
                raise ValueError(f"table keys must be single non-space letters, got {letter!r}")
            if not code or set(code) - {"0", "1"}:
                raise ValueError(f"code for {letter!r} must be a non-empty bit string")
            kraft_num += 1 << (max_len - len(code))
        if kraft_num != 1 << max_len:
            raise ValueError("codes do not satisfy Kraft equality (not a full tree)")
        ordered = sorted(self.codes.values())
        for a, b in zip(ordered, ordered[1:]):
            if b.startswith(a):
                raise ValueError(f"code {a} is a prefix of {b}")

    def __getitem__(self, letter: str) -> str:
        try:
            return self.codes[letter]
        except KeyError:
            raise UnknownLetter(f"letter {letter!r} not in the code table") from None


def letter_frequencies(message: str) -> Counter:
    """Frequency of every non-space character."""
    return Counter(ch for ch in message if ch != " ")


def build_table(message: str) -> HuffmanTable:
    """Optimal prefix code over the message's letter frequencies.

    Deterministic twice over: heap ties break on the smallest letter
    contained in a subtree, and the final codes are canonical, assigned in
    (length, letter) order.
    """
    freqs = letter_frequencies(message)
    if len(freqs) < 2:
        raise AlphabetTooSmall(
            f"need at least 2 distinct non-space letters, got {len(freqs)}"
        )
    # nodes: (weight, smallest contained letter, {letter: depth})
    heap = [(weight, letter, {letter: 0}) for letter, weight in freqs.items()]
    heapq.heapify(heap)
    while len(heap) > 1:
        w1, m1, d1 = heapq.heappop(heap)
        w2, m2, d2 = heapq.heappop(heap)
        merged = {letter: depth + 1 for letter, depth in d1.items()}
        merged.update({letter: depth + 1 for letter, depth in d2.items()})
        heapq.heappush(heap, (w1 + w2, min(m1, m2), merged))
    depths = heap[0][2]

    codes = {}
    next_code = 0
    prev_len = 0
    for letter in sorted(depths, key=lambda ch: (depths[ch], ch)):
        length = depths[letter]
        next_code <<= length - prev_len
        codes[letter] = format(next_code, f"0{length}b")
        next_code += 1
        prev_len = length
    return HuffmanTable(codes)


def encode_word(word: str, table: HuffmanTable) -> int:
    """Concatenated letter codes with a leading 1, read as a binary integer."""
    if not word:
        raise ValueError("cannot encode an empty word")
    bits = "".join(table[letter] for letter in word)
    return int("1" + bits, 2)


def decode_value(value: int, table: HuffmanTable) -> str:
    """Strip the leading 1 and parse the remaining bits greedily."""
    if value < 2:
        raise ValueError(f"word values are always at least 2, got {value}")
    bits = format(value, "b")[1:]
    by_code = {code: letter for letter, code in table.codes.items()}
    word = []
    pending = ""
    for bit in bits:
        pending += bit
        if pending in by_code:
            word.append(by_code[pending])
            pending = ""
    if pending:
        raise DanglingBits(f"leftover bits {pending!r} match no code")
    return "".join(word)


@dataclass(frozen=True)
class GraphKey:
    """Shared secret: separator alpha, scale beta, and the code table."""

    table: HuffmanTable
    alpha: int = 1
    beta: int = 1

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be a positive integer")
        if self.beta < 1:
            raise ValueError("beta must be a positive integer")

    def to_json(self) -> str:
        return json.dumps(
            {"alpha": self.alpha, "beta": self.beta, "table": dict(sorted(self.table.codes.items()))},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "GraphKey":
        raw = json.loads(text)
        return cls(HuffmanTable(dict(raw["table"])), int(raw["alpha"]), int(raw["beta"]))


@dataclass
class GraphSeries:
    """The published artifact: 1-based (x, y) points plus a cover story."""

    points: list[tuple[int, int]]
    title: str = ""


def encode_series(message: str, key: GraphKey) -> GraphSeries:
    """Scaled word values with scaled separators between consecutive words."""
    values = []
    for word in message.split():
        if values:
            values.append(key.alpha * key.beta)
        values.append(encode_word(word, key.table) * key.beta)
    return GraphSeries([(i + 1, y) for i, y in enumerate(values)])


def decode_series(series: GraphSeries, key: GraphKey) -> str:
    """Inverse of encode_series given the same key."""
    parts = []
    for _, y in series.points:
        value, remainder = divmod(y, key.beta)
        if remainder:
            raise NotDivisible(f"{y} is not a multiple of beta = {key.beta}")
        if value == key.alpha:
            parts.append(" ")
        else:
            parts.append(decode_value(value, key.table))
    return "".join(parts)


def serialize_series(series: GraphSeries) -> str:
    """CSV with an x,y header and an optional leading title comment."""
    lines = []
    if series.title:
        lines.append(f"# title: {series.title}")
    lines.append("x,y")
    lines.extend(f"{x},{y}" for x, y in series.points)
    return "\n".join(lines) + "\n"


def parse_series(text: str) -> GraphSeries:
    """Inverse of serialize_series; anything off-grammar is MalformedCsv."""
    lines = [line for line in text.splitlines() if line.strip()]
    title = ""
    if lines and lines[0].startswith("#"):
        comment = lines.pop(0)[1:].strip()
        if comment.startswith("title:"):
            title = comment[len("title:") :].strip()
    if not lines or lines[0].strip() != "x,y":
        raise MalformedCsv("missing x,y header line")
    points = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != 2:
            raise MalformedCsv(f"expected two cells, got {line!r}")
        try:
            x, y = int(cells[0]), int(cells[1])
        except ValueError:
            raise MalformedCsv(f"non-integer point {line!r}") from None
        if x != len(points) + 1:
            raise MalformedCsv(f"x values must run 1..n, got {x} at position {len(points) + 1}")
        if y < 1:
            raise MalformedCsv(f"y values must be positive, got {y}")
        points.append((x, y))
    return GraphSeries(points, title)
