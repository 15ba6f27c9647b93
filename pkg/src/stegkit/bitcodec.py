"""Payload framing and bit-stream conversion shared by every hiding technique.

Wire format of a framed payload (12 + N bytes)::

    magic    4 bytes   "SKT1"  (53 4B 54 31)
    length   4 bytes   unsigned big-endian payload byte count
    payload  N bytes
    crc      4 bytes   CRC-32 (IEEE polynomial) of the payload, big-endian

The frame is what lets an extractor recognize a hidden message and know
where it ends: magic missing means "no message" (NoMagic), magic present
but length or CRC wrong means "damaged carrier" (CorruptFrame).

Bit order is MSB-first within each byte, everywhere in the toolkit. When a
carrier's bit capacity is not a byte multiple, extractors drop the trailing
partial byte; anything after the frame is ignored.
"""

from __future__ import annotations

import struct
import zlib
from typing import Iterable, NamedTuple

from .errors import CorruptFrame, NoMagic

MAGIC = b"SKT1"
FRAME_OVERHEAD = 12  # magic + length + crc


def frame_payload(payload: bytes) -> bytes:
    """Wrap raw bytes in the self-describing frame."""
    if len(payload) >= 1 << 32:
        raise ValueError("payload too large for the 32-bit length field")
    return (
        MAGIC
        + struct.pack(">I", len(payload))
        + payload
        + struct.pack(">I", zlib.crc32(payload))
    )


def unframe_payload(stream: bytes) -> bytes:
    """Parse a frame at the start of ``stream`` and return its payload.

    Bytes after the frame are ignored, so extractors can hand over the whole
    recovered bit stream without trimming it first.
    """
    if len(stream) < 4 or stream[:4] != MAGIC:
        raise NoMagic("no frame marker at start of stream")
    if len(stream) < 8:
        raise CorruptFrame("frame header cut short")
    (length,) = struct.unpack(">I", stream[4:8])
    end = 8 + length
    if len(stream) < end + 4:
        raise CorruptFrame(
            f"frame declares {length} payload bytes but stream holds {len(stream) - 12}"
        )
    payload = stream[8:end]
    (crc,) = struct.unpack(">I", stream[end : end + 4])
    if crc != zlib.crc32(payload):
        raise CorruptFrame("payload CRC mismatch")
    return payload


class Capacity(NamedTuple):
    """Byte capacity of a carrier: raw total and payload after frame overhead."""

    total: int
    usable: int


def capacity_from_bits(bit_slots: int) -> Capacity:
    """Capacity of a carrier offering ``bit_slots`` one-bit positions."""
    total = bit_slots // 8
    return Capacity(total, max(0, total - FRAME_OVERHEAD))


def bytes_to_bits(data: bytes) -> list[int]:
    """Explode bytes into bits, most significant bit of each byte first."""
    bits = []
    for byte in data:
        for shift in range(7, -1, -1):
            bits.append((byte >> shift) & 1)
    return bits


def bits_to_bytes(bits: Iterable[int]) -> bytes:
    """Inverse of bytes_to_bits. Bit count must be a multiple of 8."""
    bits = list(bits)
    if len(bits) % 8:
        raise ValueError("bit count is not a multiple of 8")
    out = bytearray()
    for i in range(0, len(bits), 8):
        byte = 0
        for bit in bits[i : i + 8]:
            byte = (byte << 1) | (bit & 1)
        out.append(byte)
    return bytes(out)


class BitStream:
    """Ordered bit sequence with a read cursor.

    Thin reference implementation of the toolkit's bit-order convention;
    the array-based techniques use vectorized equivalents that are tested
    against it.
    """

    def __init__(self, bits: Iterable[int] = ()):
        self._bits = [1 if b else 0 for b in bits]
        self.cursor = 0

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitStream":
        return cls(bytes_to_bits(data))

    def __len__(self) -> int:
        return len(self._bits)

    @property
    def bits(self) -> list[int]:
        return list(self._bits)

    @property
    def remaining(self) -> int:
        return len(self._bits) - self.cursor

    def append(self, bit: int) -> None:
        self._bits.append(1 if bit else 0)

    def extend(self, bits: Iterable[int]) -> None:
        for bit in bits:
            self.append(bit)

    def read(self, count: int) -> list[int]:
        """Consume ``count`` bits at the cursor."""
        if count < 0 or self.cursor + count > len(self._bits):
            raise ValueError("read past end of bit stream")
        out = self._bits[self.cursor : self.cursor + count]
        self.cursor += count
        return out

    def to_bytes(self) -> bytes:
        """All bits as bytes; length must be a multiple of 8."""
        return bits_to_bytes(self._bits)

    def to_bytes_floor(self) -> bytes:
        """All complete bytes, dropping a trailing partial byte."""
        whole = len(self._bits) - len(self._bits) % 8
        return bits_to_bytes(self._bits[:whole])
