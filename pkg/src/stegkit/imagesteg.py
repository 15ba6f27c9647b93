"""Bitmap carrier codec and the two image-domain hiding techniques.

Spatial: replace the least significant bit of each 8-bit sample, in
row-major stored-channel order, with framed message bits. A 24-bit RGB
image therefore carries 3 bits per pixel.

Transform: quantize 8x8 DCT blocks, then walk coefficients in block raster
order and zig-zag order inside each block, skipping every coefficient whose
value is 0 or 1 and writing each message bit into the magnitude LSB of the
rest (sign preserved).

Carriers are uncompressed BMP files (24-bit RGB or 8-bit paletted
grayscale, bottom-up rows, 4-byte row padding). Coefficient planes travel
in their own "SCF1" container, see encode_scf / decode_scf.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .bitcodec import (
    Capacity,
    FRAME_OVERHEAD,
    capacity_from_bits,
    frame_payload,
    unframe_payload,
)
from .errors import CapacityExceeded, Truncated, UnsupportedBmp, UnsupportedScf

GRAY_WEIGHTS = (0.299, 0.587, 0.114)  # RGB -> luminance


@dataclass(frozen=True)
class RasterImage:
    """Decoded raster: 8-bit samples, row-major, channels interleaved."""

    width: int
    height: int
    channels: int  # 1 = grayscale, 3 = RGB
    samples: bytes

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 (grayscale) or 3 (RGB)")
        if self.width < 0 or self.height < 0:
            raise ValueError("image dimensions must be non-negative")
        if len(self.samples) != self.width * self.height * self.channels:
            raise ValueError(
                f"sample buffer holds {len(self.samples)} bytes, expected "
                f"{self.width * self.height * self.channels}"
            )

    def as_array(self) -> np.ndarray:
        """Samples as a (height, width, channels) uint8 array."""
        arr = np.frombuffer(self.samples, dtype=np.uint8)
        return arr.reshape(self.height, self.width, self.channels)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        h, w, c = arr.shape
        return cls(w, h, c, np.ascontiguousarray(arr, dtype=np.uint8).tobytes())


def to_grayscale(image: RasterImage) -> RasterImage:
    """Luminance conversion with fixed 0.299/0.587/0.114 weights."""
    if image.channels == 1:
        return image
    rgb = image.as_array().astype(np.float64)
    lum = rgb[:, :, 0] * GRAY_WEIGHTS[0] + rgb[:, :, 1] * GRAY_WEIGHTS[1] + rgb[:, :, 2] * GRAY_WEIGHTS[2]
    return RasterImage.from_array(np.rint(lum).clip(0, 255).astype(np.uint8))


# ---------------------------------------------------------------------------
# BMP codec (uncompressed, BITMAPINFOHEADER only)
# ---------------------------------------------------------------------------

BMP_SIGNATURE = b"BM"
_INFO_HEADER_LEN = 40


def _row_stride(width: int, bits_per_pixel: int) -> int:
    return (width * bits_per_pixel + 31) // 32 * 4


def decode_bmp(data: bytes) -> RasterImage:
    """Decode an uncompressed BMP into a top-down, unpadded raster.

    8-bit paletted files decode to one channel via palette luminance;
    24-bit files decode to RGB. Bytes after the pixel array (for example an
    appended trailer) are ignored.
    """
    if len(data) < 2 or data[:2] != BMP_SIGNATURE:
        raise UnsupportedBmp("missing BM signature")
    if len(data) < 54:
        raise Truncated("BMP header cut short")
    pixel_offset = struct.unpack_from("<I", data, 10)[0]
    info_len = struct.unpack_from("<I", data, 14)[0]
    if info_len != _INFO_HEADER_LEN:
        raise UnsupportedBmp(f"info header of {info_len} bytes, expected {_INFO_HEADER_LEN}")
    width, height = struct.unpack_from("<ii", data, 18)
    planes, bpp = struct.unpack_from("<HH", data, 26)
    compression = struct.unpack_from("<I", data, 30)[0]
    if compression != 0:
        raise UnsupportedBmp(f"compression {compression} not supported")
    if bpp not in (8, 24):
        raise UnsupportedBmp(f"{bpp} bits per pixel not supported")
    if planes != 1:
        raise UnsupportedBmp(f"planes field is {planes}, expected 1")
    if width <= 0 or height <= 0:
        raise UnsupportedBmp("non-positive dimensions (top-down BMPs not supported)")

    palette_lum = None
    if bpp == 8:
        colors_used = struct.unpack_from("<I", data, 46)[0] or 256
        pal_end = 54 + 4 * colors_used
        if len(data) < pal_end:
            raise Truncated("palette cut short")
        pal = np.frombuffer(data[54:pal_end], dtype=np.uint8).reshape(-1, 4)
        # palette entries are stored B, G, R, reserved
        lum = pal[:, 2] * GRAY_WEIGHTS[0] + pal[:, 1] * GRAY_WEIGHTS[1] + pal[:, 0] * GRAY_WEIGHTS[2]
        palette_lum = np.zeros(256, dtype=np.uint8)
        palette_lum[:colors_used] = np.rint(lum).clip(0, 255).astype(np.uint8)

    stride = _row_stride(width, bpp)
    need = pixel_offset + stride * height
    if len(data) < need:
        raise Truncated(f"pixel array needs {need} bytes, file has {len(data)}")

    rows = np.frombuffer(data[pixel_offset:need], dtype=np.uint8).reshape(height, stride)
    rows = rows[::-1]  # stored bottom-up
    if bpp == 24:
        bgr = rows[:, : width * 3].reshape(height, width, 3)
        rgb = bgr[:, :, ::-1]
        return RasterImage.from_array(rgb)
    indexed = rows[:, :width]
    return RasterImage.from_array(palette_lum[indexed])


def encode_bmp(image: RasterImage) -> bytes:
    """Encode a raster as an uncompressed BMP; inverse of decode_bmp.

    Grayscale images get a 256-entry identity palette (entry i = i,i,i).
    """
    if image.width < 1 or image.height < 1:
        raise ValueError("cannot encode an empty image as BMP")
    bpp = 8 if image.channels == 1 else 24
    stride = _row_stride(image.width, bpp)
    palette = b""
    if bpp == 8:
        palette = b"".join(bytes((i, i, i, 0)) for i in range(256))
    pixel_offset = 14 + _INFO_HEADER_LEN + len(palette)
    file_size = pixel_offset + stride * image.height

    arr = image.as_array()
    rows = np.zeros((image.height, stride), dtype=np.uint8)
    if bpp == 24:
        rows[:, : image.width * 3] = arr[:, :, ::-1].reshape(image.height, -1)
    else:
        rows[:, : image.width] = arr[:, :, 0]
    pixels = rows[::-1].tobytes()

    header = BMP_SIGNATURE + struct.pack("<IHHI", file_size, 0, 0, pixel_offset)
    info = struct.pack(
        "<IiiHHIIiiII",
        _INFO_HEADER_LEN,
        image.width,
        image.height,
        1,  # planes
        bpp,
        0,  # BI_RGB, no compression
        stride * image.height,
        2835,  # 72 dpi
        2835,
        256 if bpp == 8 else 0,
        0,
    )
    return header + info + palette + pixels


# ---------------------------------------------------------------------------
# Spatial LSB embedding
# ---------------------------------------------------------------------------


def set_lsbs(data: bytes, bits) -> bytes:
    """Replace the LSB of data[i] with bits[i]; bytes past the bit run are untouched."""
    arr = np.frombuffer(data, dtype=np.uint8).copy()
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size > arr.size:
        raise ValueError(f"{bits.size} bits will not fit in {arr.size} bytes")
    arr[: bits.size] = (arr[: bits.size] & 0xFE) | (bits & 1)
    return arr.tobytes()


def lsb_capacity(image: RasterImage) -> Capacity:
    """Whole bytes the sample LSBs can carry, and the payload share of that."""
    return capacity_from_bits(image.width * image.height * image.channels)


def lsb_embed(image: RasterImage, payload: bytes) -> RasterImage:
    """Write the framed payload into sample LSBs; all other bits unchanged."""
    cap = lsb_capacity(image)
    if len(payload) > cap.usable:
        raise CapacityExceeded(len(payload), cap.usable)
    bits = np.unpackbits(np.frombuffer(frame_payload(payload), dtype=np.uint8))
    samples = set_lsbs(image.samples, bits)
    return RasterImage(image.width, image.height, image.channels, samples)


def lsb_extract(image: RasterImage) -> bytes:
    """Read the LSB stream in embed order and unframe it."""
    samples = np.frombuffer(image.samples, dtype=np.uint8)
    whole = samples.size - samples.size % 8
    recovered = np.packbits(samples[:whole] & 1).tobytes()
    return unframe_payload(recovered)


# ---------------------------------------------------------------------------
# Quantized-DCT plane and transform-domain embedding
# ---------------------------------------------------------------------------

# Standard luminance quantization table, row-major.
BASE_QUANT = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)


def _zigzag_positions() -> list[tuple[int, int]]:
    # Anti-diagonals alternate direction: even sums walk up-right.
    order = []
    for s in range(15):
        if s % 2 == 0:
            rows = range(min(s, 7), max(0, s - 7) - 1, -1)
        else:
            rows = range(max(0, s - 7), min(s, 7) + 1)
        order.extend((r, s - r) for r in rows)
    return order


ZIGZAG = _zigzag_positions()
_ZZ_ROWS = np.array([r for r, _ in ZIGZAG])
_ZZ_COLS = np.array([c for _, c in ZIGZAG])


def _dct_matrix() -> np.ndarray:
    k = np.arange(8).reshape(8, 1)
    n = np.arange(8).reshape(1, 8)
    m = np.cos((2 * n + 1) * k * np.pi / 16) * np.sqrt(2 / 8)
    m[0, :] = np.sqrt(1 / 8)
    return m


_DCT_M = _dct_matrix()


def block_dct(block: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D type-II DCT of an 8x8 block."""
    return _DCT_M @ np.asarray(block, dtype=np.float64) @ _DCT_M.T


def block_idct(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of block_dct."""
    return _DCT_M.T @ np.asarray(coeffs, dtype=np.float64) @ _DCT_M


def quant_table(quality: int) -> np.ndarray:
    """Quality-scaled table: 50 is the base, <50 scales 5000/q %, >=50 scales (200-2q) %."""
    if not 1 <= quality <= 100:
        raise ValueError("quality must be in 1..100")
    scale = 5000 / quality if quality < 50 else 200 - 2 * quality
    table = np.floor((BASE_QUANT * scale + 50) / 100)
    return np.maximum(table, 1.0)


@dataclass
class CoeffPlane:
    """Quantized DCT coefficients: block raster order, zig-zag inside blocks.

    width/height are the original pixel dimensions; blocks cover the image
    padded up to multiples of 8.
    """

    width: int
    height: int
    quality: int
    coeffs: list[list[int]]  # one 64-entry list per block

    def __post_init__(self):
        if not 1 <= self.quality <= 100:
            raise ValueError("quality must be in 1..100")
        expected = ((self.width + 7) // 8) * ((self.height + 7) // 8)
        if len(self.coeffs) != expected:
            raise ValueError(f"{len(self.coeffs)} blocks, expected {expected}")
        if any(len(block) != 64 for block in self.coeffs):
            raise ValueError("every block must hold 64 coefficients")

    def flat(self) -> np.ndarray:
        """All coefficients in storage order as one int array."""
        return np.asarray(self.coeffs, dtype=np.int64).reshape(-1)


def image_to_coeffs(image: RasterImage, quality: int = 75) -> CoeffPlane:
    """Quantized blockwise DCT of the image (RGB reduced to luminance).

    Edge blocks are padded by replicating the last row/column; each block is
    level-shifted by -128 before the transform.
    """
    gray = to_grayscale(image)
    if gray.width < 1 or gray.height < 1:
        raise ValueError("cannot transform an empty image")
    arr = gray.as_array()[:, :, 0].astype(np.float64) - 128.0
    pad_h = (-gray.height) % 8
    pad_w = (-gray.width) % 8
    arr = np.pad(arr, ((0, pad_h), (0, pad_w)), mode="edge")
    bh, bw = arr.shape[0] // 8, arr.shape[1] // 8
    blocks = arr.reshape(bh, 8, bw, 8).transpose(0, 2, 1, 3).reshape(-1, 8, 8)
    freq = np.matmul(np.matmul(_DCT_M, blocks), _DCT_M.T)
    quant = np.rint(freq / quant_table(quality)).astype(np.int64)
    zigzagged = quant[:, _ZZ_ROWS, _ZZ_COLS]
    return CoeffPlane(gray.width, gray.height, quality, zigzagged.tolist())


def coeffs_to_image(plane: CoeffPlane) -> RasterImage:
    """Dequantize, inverse transform, level-shift back, clamp to 0..255."""
    bw = (plane.width + 7) // 8
    bh = (plane.height + 7) // 8
    zigzagged = np.asarray(plane.coeffs, dtype=np.float64)
    blocks = np.zeros((zigzagged.shape[0], 8, 8))
    blocks[:, _ZZ_ROWS, _ZZ_COLS] = zigzagged
    blocks *= quant_table(plane.quality)
    spatial = np.matmul(np.matmul(_DCT_M.T, blocks), _DCT_M) + 128.0
    full = spatial.reshape(bh, bw, 8, 8).transpose(0, 2, 1, 3).reshape(bh * 8, bw * 8)
    pixels = np.rint(full).clip(0, 255).astype(np.uint8)
    return RasterImage.from_array(pixels[: plane.height, : plane.width])


def dct_capacity(plane: CoeffPlane) -> Capacity:
    """Capacity over coefficients whose value is neither 0 nor 1."""
    flat = plane.flat()
    return capacity_from_bits(int(np.count_nonzero((flat != 0) & (flat != 1))))


def _set_magnitude_lsb(values: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Magnitude-LSB replacement with sign preserved.

    A magnitude of 1 with bit 0 moves to 2, not 0: value 0 is in the skipped
    set and would corrupt the embed/extract walk (and drop the sign).
    """
    mag = np.abs(values)
    new_mag = (mag & ~np.int64(1)) | bits.astype(np.int64)
    new_mag[new_mag == 0] = 2
    return np.where(values < 0, -new_mag, new_mag)


def dct_embed(plane: CoeffPlane, payload: bytes) -> CoeffPlane:
    """Write the framed payload into magnitude LSBs of coefficients not in {0, 1}."""
    cap = dct_capacity(plane)
    if len(payload) > cap.usable:
        raise CapacityExceeded(len(payload), cap.usable)
    flat = plane.flat()
    slots = np.nonzero((flat != 0) & (flat != 1))[0]
    bits = np.unpackbits(np.frombuffer(frame_payload(payload), dtype=np.uint8))
    used = slots[: bits.size]
    flat[used] = _set_magnitude_lsb(flat[used], bits)
    return CoeffPlane(plane.width, plane.height, plane.quality, flat.reshape(-1, 64).tolist())


def dct_extract(plane: CoeffPlane) -> bytes:
    """Read magnitude LSBs of coefficients not in {0, 1}, in embed order."""
    flat = plane.flat()
    lsbs = (np.abs(flat[(flat != 0) & (flat != 1)]) & 1).astype(np.uint8)
    whole = lsbs.size - lsbs.size % 8
    return unframe_payload(np.packbits(lsbs[:whole]).tobytes())


# ---------------------------------------------------------------------------
# SCF container for coefficient planes
# ---------------------------------------------------------------------------

SCF_MAGIC = b"SCF1"


def encode_scf(plane: CoeffPlane) -> bytes:
    """Serialize a plane: magic, u16 width/height, u8 quality, then s16 BE coefficients."""
    if not (plane.width < 1 << 16 and plane.height < 1 << 16):
        raise ValueError("dimensions exceed the 16-bit container fields")
    flat = plane.flat()
    if flat.size and (flat.min() < -(1 << 15) or flat.max() >= 1 << 15):
        raise ValueError("coefficient outside signed 16-bit range")
    header = SCF_MAGIC + struct.pack(">HHB", plane.width, plane.height, plane.quality)
    return header + flat.astype(">i2").tobytes()


def decode_scf(data: bytes) -> CoeffPlane:
    """Inverse of encode_scf; trailing bytes are ignored."""
    if len(data) < 4 or data[:4] != SCF_MAGIC:
        raise UnsupportedScf("missing SCF1 signature")
    if len(data) < 9:
        raise Truncated("SCF header cut short")
    width, height, quality = struct.unpack_from(">HHB", data, 4)
    if width < 1 or height < 1:
        raise UnsupportedScf("zero dimension")
    if not 1 <= quality <= 100:
        raise UnsupportedScf(f"quality byte {quality} outside 1..100")
    blocks = ((width + 7) // 8) * ((height + 7) // 8)
    need = 9 + blocks * 64 * 2
    if len(data) < need:
        raise Truncated(f"plane needs {need} bytes, file has {len(data)}")
    coeffs = np.frombuffer(data[9:need], dtype=">i2").astype(np.int64)
    return CoeffPlane(width, height, quality, coeffs.reshape(-1, 64).tolist())
