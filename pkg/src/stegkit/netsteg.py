"""TCP/IP covert channels carried in pcap files.

A message is sent one byte per packet, hidden in a header field that
routers and casual observers treat as bookkeeping:

- ``ipid``  the IPv4 Identification field holds the byte value directly
  (optionally scaled, see ``id_scale``)
- ``seq``   the TCP initial sequence number holds byte * 16777216, so the
  receiver recovers it by dividing by 2**24
- ``ack``   the bounce variant: the capture models what the receiver sees
  coming back from a bounce server that answered a spoofed SYN, so the
  byte arrives as acknowledgment = byte * 16777216 + 1

Packets are fully valid IPv4+TCP with correct checksums, serialized to the
classic pcap format (linktype 101, raw IP) that any network analyzer opens.
No live traffic is ever generated.
"""

from __future__ import annotations

import enum
import random
import struct
from dataclasses import dataclass, replace
from typing import NamedTuple

from .errors import BadMagic, FieldOutOfRange, MalformedPacket, Truncated

BYTE_MULTIPLIER = 16777216  # 2**24: covert byte in the top 8 bits of a 32-bit field

FLAG_SYN = 0x02
FLAG_ACK = 0x10

PCAP_MAGIC_LE = 0xA1B2C3D4  # written little-endian: D4 C3 B2 A1 on disk
LINKTYPE_RAW_IPV4 = 101
PCAP_SNAPLEN = 65535


class CovertMode(enum.Enum):
    IPID = "ipid"
    SEQ = "seq"
    ACK_BOUNCE = "ack"


def ones_complement_checksum(data: bytes) -> int:
    """Standard Internet checksum: 16-bit ones'-complement sum, complemented."""
    if len(data) % 2:
        data += b"\x00"
    total = sum(struct.unpack(f">{len(data) // 2}H", data))
    while total > 0xFFFF:
        total = (total & 0xFFFF) + (total >> 16)
    return total ^ 0xFFFF


def _pack_addr(addr: str) -> bytes:
    parts = addr.split(".")
    if len(parts) != 4 or not all(p.isdigit() and 0 <= int(p) <= 255 for p in parts):
        raise ValueError(f"bad IPv4 address {addr!r}")
    return bytes(int(p) for p in parts)


def _unpack_addr(raw: bytes) -> str:
    return ".".join(str(b) for b in raw)


@dataclass(frozen=True)
class Ipv4Header:
    """RFC 791 header, fixed 20-byte layout (ihl = 5, no options)."""

    tos: int
    total_length: int
    identification: int
    flags_fragment: int
    ttl: int
    protocol: int
    header_checksum: int
    src_addr: str
    dst_addr: str
    version: int = 4
    ihl: int = 5

    def pack(self) -> bytes:
        return struct.pack(
            ">BBHHHBBH4s4s",
            (self.version << 4) | self.ihl,
            self.tos,
            self.total_length,
            self.identification,
            self.flags_fragment,
            self.ttl,
            self.protocol,
            self.header_checksum,
            _pack_addr(self.src_addr),
            _pack_addr(self.dst_addr),
        )

    @classmethod
    def unpack(cls, data: bytes) -> "Ipv4Header":
        if len(data) < 20:
            raise MalformedPacket("IPv4 header shorter than 20 bytes")
        vihl, tos, tot, ident, ff, ttl, proto, csum, src, dst = struct.unpack(
            ">BBHHHBBH4s4s", data[:20]
        )
        if vihl >> 4 != 4:
            raise MalformedPacket(f"IP version {vihl >> 4}, expected 4")
        if vihl & 0x0F != 5:
            raise MalformedPacket("IPv4 options not supported (ihl != 5)")
        return cls(tos, tot, ident, ff, ttl, proto, csum, _unpack_addr(src), _unpack_addr(dst))


@dataclass(frozen=True)
class TcpHeader:
    """RFC 793 header, fixed 20-byte layout (data offset = 5, no options)."""

    src_port: int
    dst_port: int
    sequence: int
    acknowledgment: int
    flags: int
    window: int
    checksum: int
    urgent: int = 0
    data_offset: int = 5

    def pack(self) -> bytes:
        return struct.pack(
            ">HHIIBBHHH",
            self.src_port,
            self.dst_port,
            self.sequence,
            self.acknowledgment,
            self.data_offset << 4,
            self.flags,
            self.window,
            self.checksum,
            self.urgent,
        )

    @classmethod
    def unpack(cls, data: bytes) -> "TcpHeader":
        if len(data) < 20:
            raise MalformedPacket("TCP header shorter than 20 bytes")
        sport, dport, seq, ack, off, flags, window, csum, urg = struct.unpack(
            ">HHIIBBHHH", data[:20]
        )
        if off >> 4 != 5:
            raise MalformedPacket("TCP options not supported (data offset != 5)")
        return cls(sport, dport, seq, ack, flags, window, csum, urg)


def tcp_pseudo_header(src_addr: str, dst_addr: str, tcp_length: int) -> bytes:
    return _pack_addr(src_addr) + _pack_addr(dst_addr) + struct.pack(">BBH", 0, 6, tcp_length)


def build_packet(ip: Ipv4Header, tcp: TcpHeader) -> bytes:
    """Serialize with both checksums filled in."""
    tcp_zero = replace(tcp, checksum=0).pack()
    tcp_csum = ones_complement_checksum(
        tcp_pseudo_header(ip.src_addr, ip.dst_addr, len(tcp_zero)) + tcp_zero
    )
    ip_zero = replace(ip, header_checksum=0).pack()
    ip_csum = ones_complement_checksum(ip_zero)
    return replace(ip, header_checksum=ip_csum).pack() + replace(tcp, checksum=tcp_csum).pack()


def parse_packet(data: bytes) -> tuple[Ipv4Header, TcpHeader]:
    """Parse and verify an IPv4+TCP packet; any inconsistency is MalformedPacket."""
    ip = Ipv4Header.unpack(data)
    if ones_complement_checksum(data[:20]) != 0:
        raise MalformedPacket("IP header checksum invalid")
    if ip.protocol != 6:
        raise MalformedPacket(f"protocol {ip.protocol}, expected TCP (6)")
    if ip.total_length != len(data):
        raise MalformedPacket("IP total length does not match packet size")
    segment = data[20:]
    tcp = TcpHeader.unpack(segment)
    if ones_complement_checksum(tcp_pseudo_header(ip.src_addr, ip.dst_addr, len(segment)) + segment) != 0:
        raise MalformedPacket("TCP checksum invalid")
    return ip, tcp


# ---------------------------------------------------------------------------
# Capture model and covert coding
# ---------------------------------------------------------------------------


class PcapRecord(NamedTuple):
    ts_sec: int
    ts_usec: int
    data: bytes


@dataclass
class PcapCapture:
    records: list[PcapRecord]
    linktype: int = LINKTYPE_RAW_IPV4


def covert_encode(
    message: bytes,
    mode: CovertMode,
    src_addr: str = "10.0.0.1",
    dst_addr: str = "10.0.0.2",
    src_port: int = 40000,
    dst_port: int = 80,
    *,
    id_scale: int = 1,
    seed: int = 0,
    ts_interval: int = 1,
) -> PcapCapture:
    """One packet per message byte, in order, one timestamp step apart.

    Non-covert fields come from a generator seeded with ``seed`` so captures
    are reproducible. For ACK_BOUNCE, src_addr is the bounce server and
    dst_addr the receiver, because the capture models the bounced leg.
    """
    if not message:
        raise ValueError("message must not be empty")
    if id_scale < 1 or 255 * id_scale > 0xFFFF:
        raise ValueError("id_scale must be in 1..257")
    rng = random.Random(seed)
    records = []
    for i, byte in enumerate(message):
        identification = rng.getrandbits(16)
        sequence = rng.getrandbits(32)
        acknowledgment = 0
        flags = FLAG_SYN
        if mode is CovertMode.IPID:
            identification = byte * id_scale
        elif mode is CovertMode.SEQ:
            sequence = byte * BYTE_MULTIPLIER
        elif mode is CovertMode.ACK_BOUNCE:
            acknowledgment = byte * BYTE_MULTIPLIER + 1
            flags = FLAG_SYN | FLAG_ACK
        else:
            raise ValueError(f"unknown mode {mode!r}")
        ip = Ipv4Header(
            tos=0,
            total_length=40,
            identification=identification,
            flags_fragment=0,
            ttl=64,
            protocol=6,
            header_checksum=0,
            src_addr=src_addr,
            dst_addr=dst_addr,
        )
        tcp = TcpHeader(
            src_port=src_port,
            dst_port=dst_port,
            sequence=sequence,
            acknowledgment=acknowledgment,
            flags=flags,
            window=512,
            checksum=0,
        )
        records.append(PcapRecord(i * ts_interval, 0, build_packet(ip, tcp)))
    return PcapCapture(records)


def covert_decode(capture: PcapCapture, mode: CovertMode, *, id_scale: int = 1) -> bytes:
    """Recover one byte per packet, reading packets in timestamp order."""
    out = bytearray()
    ordered = sorted(capture.records, key=lambda r: (r.ts_sec, r.ts_usec))
    for record in ordered:
        ip, tcp = parse_packet(record.data)
        if mode is CovertMode.IPID:
            value, remainder = divmod(ip.identification, id_scale)
            if remainder or value > 255:
                raise FieldOutOfRange(
                    f"identification {ip.identification} is not a byte times {id_scale}"
                )
        elif mode is CovertMode.SEQ:
            value, remainder = divmod(tcp.sequence, BYTE_MULTIPLIER)
            if remainder:
                raise FieldOutOfRange(f"sequence {tcp.sequence} is not a multiple of 2**24")
        elif mode is CovertMode.ACK_BOUNCE:
            value, remainder = divmod(tcp.acknowledgment - 1, BYTE_MULTIPLIER)
            if remainder or value < 0:
                raise FieldOutOfRange(
                    f"acknowledgment {tcp.acknowledgment} is not a byte times 2**24 plus 1"
                )
        else:
            raise ValueError(f"unknown mode {mode!r}")
        out.append(value)
    return bytes(out)


# ---------------------------------------------------------------------------
# Classic pcap container
# ---------------------------------------------------------------------------


def write_pcap(capture: PcapCapture) -> bytes:
    """Little-endian classic pcap, version 2.4."""
    out = bytearray(
        struct.pack(
            "<IHHiIII",
            PCAP_MAGIC_LE,
            2,
            4,
            0,  # timezone offset
            0,  # timestamp accuracy
            PCAP_SNAPLEN,
            capture.linktype,
        )
    )
    for record in capture.records:
        out += struct.pack("<IIII", record.ts_sec, record.ts_usec, len(record.data), len(record.data))
        out += record.data
    return bytes(out)


def read_pcap(data: bytes) -> PcapCapture:
    """Parse classic pcap in either byte order; inverse of write_pcap."""
    if len(data) < 24:
        raise Truncated("pcap global header cut short")
    magic = data[:4]
    if magic == b"\xd4\xc3\xb2\xa1":
        endian = "<"
    elif magic == b"\xa1\xb2\xc3\xd4":
        endian = ">"
    else:
        raise BadMagic(f"unrecognized pcap magic {magic.hex()}")
    major, minor, _, _, _, linktype = struct.unpack(f"{endian}HHiIII", data[4:24])
    if (major, minor) != (2, 4):
        raise BadMagic(f"pcap version {major}.{minor}, expected 2.4")
    records = []
    offset = 24
    while offset < len(data):
        if offset + 16 > len(data):
            raise Truncated("pcap record header cut short")
        ts_sec, ts_usec, incl_len, _ = struct.unpack_from(f"{endian}IIII", data, offset)
        offset += 16
        if offset + incl_len > len(data):
            raise Truncated("pcap record body cut short")
        records.append(PcapRecord(ts_sec, ts_usec, data[offset : offset + incl_len]))
        offset += incl_len
    return PcapCapture(records, linktype)
