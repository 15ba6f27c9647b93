"""Byte-append hiding and its detection.

Concatenating a payload after a complete image file leaves the image
perfectly viewable: decoders stop at the format's end marker. The flip side
is that the trailer is a signature anyone can scan for, which is exactly
what scan_trailer does: locate the host's declared end and report whatever
follows it.

Host boundaries: JPEG ends at the last FF D9 marker, PNG at the end of the
IEND chunk (including its CRC), BMP at the file size declared in its
header.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import NoTrailer

JPEG_SOI = b"\xff\xd8"
JPEG_EOI = b"\xff\xd9"
PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
ZIP_LOCAL_HEADER = b"PK\x03\x04"
_TEXT_BYTES = frozenset(range(0x20, 0x7F)) | frozenset(b"\t\n\r")


@dataclass(frozen=True)
class TrailerFinding:
    """Appended data located past a host file's natural end."""

    host_format: str  # jpeg | png | bmp | unknown
    trailer_offset: int
    trailer_kind: str  # zip | text | unknown


def append_embed(cover: bytes, payload: bytes) -> bytes:
    """The byte-stream copy trick: cover followed by payload, byte for byte."""
    if not cover:
        raise ValueError("cover must not be empty")
    return cover + payload


def host_boundary(data: bytes) -> tuple[str, int] | None:
    """Detect the host format and the offset where its own bytes end.

    Returns None when the format is not recognized. For JPEG the boundary
    follows the last FF D9 in the file; a payload containing FF D9 therefore
    shifts it (thumbnails embed earlier end markers, so "last" is the robust
    simple rule).
    """
    if data.startswith(JPEG_SOI):
        eoi = data.rfind(JPEG_EOI)
        if eoi < 0:
            return None
        return "jpeg", eoi + 2
    if data.startswith(PNG_SIGNATURE):
        offset = len(PNG_SIGNATURE)
        while offset + 8 <= len(data):
            length, ctype = struct.unpack_from(">I4s", data, offset)
            offset += 12 + length  # length + type + data + crc
            if ctype == b"IEND":
                return ("png", offset) if offset <= len(data) else None
        return None
    if data.startswith(b"BM") and len(data) >= 6:
        declared = struct.unpack_from("<I", data, 2)[0]
        if 14 <= declared <= len(data):
            return "bmp", declared
        return None
    return None


def classify_trailer(trailer: bytes) -> str:
    """Best-effort label from leading bytes: zip, printable text, or unknown."""
    if trailer.startswith(ZIP_LOCAL_HEADER):
        return "zip"
    if trailer and all(b in _TEXT_BYTES for b in trailer):
        return "text"
    return "unknown"


def scan_trailer(data: bytes) -> TrailerFinding | None:
    """Report appended data after the host boundary, or None if clean."""
    located = host_boundary(data)
    if located is None:
        return None
    host, boundary = located
    if boundary >= len(data):
        return None
    return TrailerFinding(host, boundary, classify_trailer(data[boundary:]))


def extract_trailer(data: bytes) -> bytes:
    """Return the appended bytes verbatim; never unpacks archives."""
    finding = scan_trailer(data)
    if finding is None:
        raise NoTrailer("no appended data past the host boundary")
    return data[finding.trailer_offset :]
