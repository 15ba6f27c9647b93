"""The ``stegkit`` command line.

One subcommand family per technique, each with an embed side and an
extract side, plus ``analyze`` for the detection tools. Exit codes:

    0  success
    1  nothing found (an extract or scan came up empty)
    2  usage error
    3  data error (unreadable, unsupported, or corrupted input)

Extractors write recovered bytes to --out when given, otherwise to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import audiosteg, filesteg, graphsteg, imagesteg, netsteg, steganalysis
from .errors import NoMagic, NoTrailer, StegError


def _read(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _write(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def _emit(data: bytes, out: str | None) -> None:
    if out:
        _write(out, data)
        print(f"wrote {len(data)} bytes to {out}")
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _message_arg(args) -> bytes:
    if getattr(args, "msg", None) is not None:
        return args.msg.encode()
    return _read(args.infile)


# --- image (spatial LSB on BMP) --------------------------------------------


def cmd_image_embed(args) -> int:
    cover = imagesteg.decode_bmp(_read(args.cover))
    stego = imagesteg.lsb_embed(cover, _read(args.infile))
    _write(args.out, imagesteg.encode_bmp(stego))
    cap = imagesteg.lsb_capacity(cover)
    print(f"embedded {len(_read(args.infile))} bytes into {args.out} (usable capacity {cap.usable})")
    return 0


def cmd_image_extract(args) -> int:
    payload = imagesteg.lsb_extract(imagesteg.decode_bmp(_read(args.stego)))
    _emit(payload, args.out)
    return 0


def cmd_image_capacity(args) -> int:
    cap = imagesteg.lsb_capacity(imagesteg.decode_bmp(_read(args.cover)))
    print(f"total {cap.total} bytes, usable {cap.usable} bytes")
    return 0


# --- dct (transform domain, BMP in, SCF out) --------------------------------


def cmd_dct_embed(args) -> int:
    cover = imagesteg.decode_bmp(_read(args.cover))
    plane = imagesteg.image_to_coeffs(cover, args.quality)
    stego = imagesteg.dct_embed(plane, _read(args.infile))
    _write(args.out, imagesteg.encode_scf(stego))
    cap = imagesteg.dct_capacity(plane)
    print(f"embedded {len(_read(args.infile))} bytes into {args.out} (usable capacity {cap.usable})")
    return 0


def cmd_dct_extract(args) -> int:
    payload = imagesteg.dct_extract(imagesteg.decode_scf(_read(args.stego)))
    _emit(payload, args.out)
    return 0


# --- file (byte append) ------------------------------------------------------


def cmd_file_append(args) -> int:
    cover = _read(args.cover)
    payload = _read(args.infile)
    _write(args.out, filesteg.append_embed(cover, payload))
    print(f"cover {len(cover)} bytes + payload {len(payload)} bytes -> {args.out} ({len(cover) + len(payload)} bytes)")
    return 0


def cmd_file_scan(args) -> int:
    finding = filesteg.scan_trailer(_read(args.stego))
    if finding is None:
        print("no trailer found")
        return 1
    print(
        f"{finding.trailer_kind} trailer at offset {finding.trailer_offset} "
        f"({finding.host_format} host)"
    )
    return 0


def cmd_file_extract(args) -> int:
    _emit(filesteg.extract_trailer(_read(args.stego)), args.out)
    return 0


# --- audio (sample LSB and spectrogram painting) -----------------------------


def cmd_audio_embed(args) -> int:
    cover = audiosteg.decode_wav(_read(args.cover))
    stego = audiosteg.audio_lsb_embed(cover, _read(args.infile))
    _write(args.out, audiosteg.encode_wav(stego))
    cap = audiosteg.audio_lsb_capacity(cover)
    print(f"embedded {len(_read(args.infile))} bytes into {args.out} (usable capacity {cap.usable})")
    return 0


def cmd_audio_extract(args) -> int:
    _emit(audiosteg.audio_lsb_extract(audiosteg.decode_wav(_read(args.stego))), args.out)
    return 0


def _spectro_params(args) -> audiosteg.SpectroParams:
    return audiosteg.SpectroParams(
        f_min=args.f_min,
        f_max=args.f_max,
        samples_per_column=args.samples_per_column,
        fft_size=args.fft_size,
    )


def cmd_audio_paint(args) -> int:
    if args.text is not None:
        image = audiosteg.rasterize_text(args.text)
    else:
        image = imagesteg.decode_bmp(_read(args.image))
    audio = audiosteg.spectro_encode(image, _spectro_params(args), args.rate)
    _write(args.out, audiosteg.encode_wav(audio))
    print(f"painted {image.width}x{image.height} image into {args.out} ({audio.duration:.2f} s)")
    return 0


def cmd_audio_unpaint(args) -> int:
    audio = audiosteg.decode_wav(_read(args.stego))
    params = _spectro_params(args)
    width = args.width or max(1, len(audio) // params.samples_per_column)
    image = audiosteg.spectro_decode(audio, args.height, width, params)
    _write(args.out, imagesteg.encode_bmp(image))
    print(f"rendered spectrogram to {args.out} ({image.width}x{image.height})")
    return 0


# --- net (covert channels in pcap) ------------------------------------------


def cmd_net_send(args) -> int:
    capture = netsteg.covert_encode(
        _message_arg(args),
        netsteg.CovertMode(args.mode),
        args.src,
        args.dst,
        args.sport,
        args.dport,
        id_scale=args.id_scale,
        seed=args.seed,
    )
    _write(args.out, netsteg.write_pcap(capture))
    print(f"wrote {len(capture.records)} packets to {args.out}")
    return 0


def cmd_net_recv(args) -> int:
    capture = netsteg.read_pcap(_read(args.capture))
    message = netsteg.covert_decode(capture, netsteg.CovertMode(args.mode), id_scale=args.id_scale)
    _emit(message, args.out)
    return 0


# --- graph (Huffman-coded data series) ---------------------------------------


def cmd_graph_keygen(args) -> int:
    corpus = args.corpus if args.corpus is not None else _read(args.infile).decode()
    key = graphsteg.GraphKey(graphsteg.build_table(corpus), args.alpha, args.beta)
    with open(args.out, "w") as fh:
        fh.write(key.to_json() + "\n")
    print(f"wrote key with {len(key.table.codes)} letters to {args.out}")
    return 0


def _load_key(path: str) -> graphsteg.GraphKey:
    with open(path) as fh:
        return graphsteg.GraphKey.from_json(fh.read())


def cmd_graph_encode(args) -> int:
    key = _load_key(args.key)
    message = args.msg if args.msg is not None else _read(args.infile).decode()
    series = graphsteg.encode_series(message, key)
    series.title = args.title
    with open(args.out, "w") as fh:
        fh.write(graphsteg.serialize_series(series))
    print(f"encoded {len(series.points)} points to {args.out}")
    return 0


def cmd_graph_decode(args) -> int:
    key = _load_key(args.key)
    with open(args.series) as fh:
        series = graphsteg.parse_series(fh.read())
    message = graphsteg.decode_series(series, key)
    _emit(message.encode(), args.out)
    return 0


# --- analyze ------------------------------------------------------------------


def cmd_analyze(args) -> int:
    reports = steganalysis.analyze_path(args.path, args.window)
    if args.json:
        if len(reports) == 1:
            print(json.dumps(reports[0].to_dict(), indent=2))
        else:
            print(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        for report in reports:
            print(report.to_line())
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stegkit",
        description="Hide data in images, files, audio, packet captures, and data series, or detect exactly that.",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for all generated randomness (default 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    def extractor(p):
        p.add_argument("--out", help="write recovered bytes here instead of stdout")

    image = sub.add_parser("image", help="pixel-LSB embedding in BMP images").add_subparsers(
        dest="action", required=True
    )
    p = image.add_parser("embed", help="hide a payload in pixel LSBs")
    p.add_argument("--cover", required=True, help="cover BMP")
    p.add_argument("--in", dest="infile", required=True, help="payload file")
    p.add_argument("--out", required=True, help="stego BMP to write")
    p.set_defaults(func=cmd_image_embed)
    p = image.add_parser("extract", help="recover a payload from pixel LSBs")
    p.add_argument("stego", help="stego BMP")
    extractor(p)
    p.set_defaults(func=cmd_image_extract)
    p = image.add_parser("capacity", help="report how many payload bytes fit")
    p.add_argument("cover", help="cover BMP")
    p.set_defaults(func=cmd_image_capacity)

    dct = sub.add_parser("dct", help="quantized-DCT embedding (BMP in, SCF out)").add_subparsers(
        dest="action", required=True
    )
    p = dct.add_parser("embed", help="hide a payload in DCT coefficient LSBs")
    p.add_argument("--cover", required=True, help="cover BMP")
    p.add_argument("--in", dest="infile", required=True, help="payload file")
    p.add_argument("--out", required=True, help="stego SCF to write")
    p.add_argument("--quality", type=int, default=75, help="quantization quality 1..100 (default 75)")
    p.set_defaults(func=cmd_dct_embed)
    p = dct.add_parser("extract", help="recover a payload from an SCF plane")
    p.add_argument("stego", help="stego SCF")
    extractor(p)
    p.set_defaults(func=cmd_dct_extract)

    filecmd = sub.add_parser("file", help="byte-append hiding behind a host file").add_subparsers(
        dest="action", required=True
    )
    p = filecmd.add_parser("append", help="append a payload after a JPEG/PNG/BMP")
    p.add_argument("--cover", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_file_append)
    p = filecmd.add_parser("scan", help="look for appended data")
    p.add_argument("stego")
    p.set_defaults(func=cmd_file_scan)
    p = filecmd.add_parser("extract", help="recover appended data")
    p.add_argument("stego")
    extractor(p)
    p.set_defaults(func=cmd_file_extract)

    audio = sub.add_parser("audio", help="WAV sample-LSB embedding and spectrogram painting").add_subparsers(
        dest="action", required=True
    )
    p = audio.add_parser("embed", help="hide a payload in sample LSBs")
    p.add_argument("--cover", required=True, help="cover WAV (mono 16-bit PCM)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_audio_embed)
    p = audio.add_parser("extract", help="recover a payload from sample LSBs")
    p.add_argument("stego")
    extractor(p)
    p.set_defaults(func=cmd_audio_extract)

    def spectro_flags(p):
        p.add_argument("--f-min", type=float, default=500.0, help="bottom-row frequency in Hz")
        p.add_argument("--f-max", type=float, default=5000.0, help="top-row frequency in Hz")
        p.add_argument("--samples-per-column", type=int, default=1024)
        p.add_argument("--fft-size", type=int, default=4096)

    p = audio.add_parser("paint", help="turn text or a BMP into sound whose spectrogram shows it")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--text", help="message to rasterize with the built-in font")
    group.add_argument("--image", help="BMP to paint instead of text")
    p.add_argument("--out", required=True, help="WAV to write")
    p.add_argument("--rate", type=int, default=audiosteg.DEFAULT_SAMPLE_RATE)
    spectro_flags(p)
    p.set_defaults(func=cmd_audio_paint)
    p = audio.add_parser("unpaint", help="render a WAV's spectrogram back to a BMP")
    p.add_argument("stego", help="WAV to analyze")
    p.add_argument("--out", required=True, help="BMP to write")
    p.add_argument("--height", type=int, default=8, help="output rows (default: font height 8)")
    p.add_argument("--width", type=int, default=0, help="output columns (default: one per hop)")
    spectro_flags(p)
    p.set_defaults(func=cmd_audio_unpaint)

    net = sub.add_parser("net", help="TCP/IP covert channels in pcap captures").add_subparsers(
        dest="action", required=True
    )
    p = net.add_parser("send", help="encode a message into a packet capture")
    p.add_argument("--mode", choices=["ipid", "seq", "ack"], required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--msg", help="message text")
    group.add_argument("--in", dest="infile", help="message file")
    p.add_argument("--out", required=True, help="pcap to write")
    p.add_argument("--src", default="10.0.0.1", help="source address (bounce server in ack mode)")
    p.add_argument("--dst", default="10.0.0.2", help="destination address")
    p.add_argument("--sport", type=int, default=40000)
    p.add_argument("--dport", type=int, default=80)
    p.add_argument("--id-scale", type=int, default=1, help="multiplier for ipid mode (256 for Covert_TCP interop)")
    p.set_defaults(func=cmd_net_send)
    p = net.add_parser("recv", help="decode a message from a packet capture")
    p.add_argument("--mode", choices=["ipid", "seq", "ack"], required=True)
    p.add_argument("capture", help="pcap to read")
    p.add_argument("--id-scale", type=int, default=1)
    extractor(p)
    p.set_defaults(func=cmd_net_recv)

    graph = sub.add_parser("graph", help="Huffman-coded word values as an x,y data series").add_subparsers(
        dest="action", required=True
    )
    p = graph.add_parser("keygen", help="build a code table from a corpus and write the key")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--corpus", help="text whose letter frequencies shape the code")
    group.add_argument("--in", dest="infile", help="corpus file")
    p.add_argument("--alpha", type=int, default=1, help="separator value (default 1)")
    p.add_argument("--beta", type=int, default=1, help="scale factor (default 1)")
    p.add_argument("--out", required=True, help="key JSON to write")
    p.set_defaults(func=cmd_graph_keygen)
    p = graph.add_parser("encode", help="encode a message as a series CSV")
    p.add_argument("--key", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--msg")
    group.add_argument("--in", dest="infile")
    p.add_argument("--title", default="", help="cover-story comment for the CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_graph_encode)
    p = graph.add_parser("decode", help="decode a series CSV back to text")
    p.add_argument("--key", required=True)
    p.add_argument("series")
    extractor(p)
    p.set_defaults(func=cmd_graph_decode)

    p = sub.add_parser("analyze", help="run steganalysis over a file or directory")
    p.add_argument("path")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--window", type=int, default=None, help="chi-square window size in samples")
    p.set_defaults(func=cmd_analyze)

    return parser


def run_cli(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (NoMagic, NoTrailer) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except StegError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
