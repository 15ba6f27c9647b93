"""WAV carrier codec and the two audio hiding techniques.

Sample LSB coding works exactly like the pixel variant: one framed message
bit replaces the least significant bit of each 16-bit sample, in order.

Spectrogram painting turns an image into sound: every image row drives one
oscillator whose frequency falls linearly from f_max (top row) to f_min
(bottom row), and every image column gates those oscillators for a fixed
number of samples. Viewing the result as a magnitude spectrogram displays
the image again, which is how the hidden text is read back.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import font5x7
from .bitcodec import Capacity, capacity_from_bits, frame_payload, unframe_payload
from .errors import (
    AudioTooShort,
    CapacityExceeded,
    Truncated,
    UnsupportedChar,
    UnsupportedWav,
)
from .imagesteg import RasterImage, to_grayscale

DEFAULT_SAMPLE_RATE = 44100
PEAK_FRACTION = 0.9  # spectrogram mixes are normalized to 90% full scale


@dataclass(eq=False)
class WavAudio:
    """Mono 16-bit PCM sample buffer."""

    samples: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        arr = np.asarray(self.samples)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional (mono)")
        if arr.size and (arr.min() < -32768 or arr.max() > 32767):
            raise ValueError("sample outside the signed 16-bit range")
        self.samples = arr.astype(np.int16)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


# ---------------------------------------------------------------------------
# WAV codec (RIFF/WAVE, PCM, mono, 16-bit)
# ---------------------------------------------------------------------------


def decode_wav(data: bytes) -> WavAudio:
    """Parse a RIFF/WAVE file; only PCM mono 16-bit is accepted."""
    if len(data) < 12:
        raise Truncated("RIFF header cut short")
    if data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise UnsupportedWav("not a RIFF/WAVE file")

    fmt = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id, size = struct.unpack_from("<4sI", data, offset)
        body = data[offset + 8 : offset + 8 + size]
        if len(body) < size:
            raise Truncated(f"chunk {chunk_id!r} cut short")
        if chunk_id == b"fmt ":
            if size < 16:
                raise UnsupportedWav("fmt chunk too small")
            audio_format, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", body)
            if audio_format != 1:
                raise UnsupportedWav(f"format code {audio_format}, only PCM (1) supported")
            if channels != 1:
                raise UnsupportedWav(f"{channels} channels, only mono supported")
            if bits != 16:
                raise UnsupportedWav(f"{bits}-bit samples, only 16-bit supported")
            fmt = rate
        elif chunk_id == b"data":
            if fmt is None:
                raise UnsupportedWav("data chunk before fmt chunk")
            if size % 2:
                raise UnsupportedWav("odd data chunk size for 16-bit samples")
            samples = np.frombuffer(body, dtype="<i2")
            return WavAudio(samples, fmt)
        offset += 8 + size + (size & 1)  # chunks are word-aligned
    raise Truncated("no data chunk found")


def encode_wav(audio: WavAudio) -> bytes:
    """Write the canonical 44-byte header followed by little-endian samples."""
    data = audio.samples.astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(data),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        1,  # mono
        audio.sample_rate,
        audio.sample_rate * 2,
        2,  # block align
        16,
        b"data",
        len(data),
    )
    return header + data


# ---------------------------------------------------------------------------
# Sample-LSB coding
# ---------------------------------------------------------------------------


def audio_lsb_capacity(audio: WavAudio) -> Capacity:
    return capacity_from_bits(len(audio))


def audio_lsb_embed(audio: WavAudio, payload: bytes) -> WavAudio:
    """One framed message bit per sample LSB, in sample order."""
    cap = audio_lsb_capacity(audio)
    if len(payload) > cap.usable:
        raise CapacityExceeded(len(payload), cap.usable)
    bits = np.unpackbits(np.frombuffer(frame_payload(payload), dtype=np.uint8))
    samples = audio.samples.copy()
    samples[: bits.size] = (samples[: bits.size] & ~np.int16(1)) | bits.astype(np.int16)
    return WavAudio(samples, audio.sample_rate)


def audio_lsb_extract(audio: WavAudio) -> bytes:
    lsbs = (audio.samples & 1).astype(np.uint8)
    whole = lsbs.size - lsbs.size % 8
    return unframe_payload(np.packbits(lsbs[:whole]).tobytes())


# ---------------------------------------------------------------------------
# Spectrogram painting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectroParams:
    """Image-to-sound mapping: rows span [f_min, f_max], columns span time."""

    f_min: float = 500.0
    f_max: float = 5000.0
    samples_per_column: int = 1024
    fft_size: int = 4096
    window: str = "hann"

    def __post_init__(self):
        if not 0 < self.f_min < self.f_max:
            raise ValueError("need 0 < f_min < f_max")
        if self.samples_per_column < 1:
            raise ValueError("samples_per_column must be positive")
        if self.fft_size < self.samples_per_column:
            raise ValueError("fft_size must be at least samples_per_column")
        if self.window != "hann":
            raise ValueError("only the Hann window is supported")


def row_frequencies(height: int, params: SpectroParams) -> np.ndarray:
    """Oscillator frequency per image row; row 0 is the top and maps to f_max."""
    if height < 2:
        raise ValueError("image height must be at least 2")
    rows = np.arange(height)
    return params.f_min + (height - 1 - rows) / (height - 1) * (params.f_max - params.f_min)


def rasterize_text(text: str) -> RasterImage:
    """Render printable ASCII as white-on-black pixels with the built-in font.

    One line, 6x8 cells (5x7 glyphs plus one pixel of spacing), so the image
    is 6*len(text) wide and 8 tall.
    """
    for ch in text:
        if ch not in font5x7.FONT:
            raise UnsupportedChar(f"no glyph for {ch!r}")
    width = font5x7.CELL_WIDTH * len(text)
    canvas = np.zeros((font5x7.CELL_HEIGHT, width), dtype=np.uint8)
    for i, ch in enumerate(text):
        columns = font5x7.FONT[ch]
        x0 = i * font5x7.CELL_WIDTH
        for dx, column in enumerate(columns):
            for dy in range(font5x7.GLYPH_HEIGHT):
                if (column >> dy) & 1:
                    canvas[dy, x0 + dx] = 255
    return RasterImage(width, font5x7.CELL_HEIGHT, 1, canvas.tobytes())


def spectro_encode(
    image: RasterImage,
    params: SpectroParams = SpectroParams(),
    sample_rate: int = DEFAULT_SAMPLE_RATE,
) -> WavAudio:
    """Sum one sine oscillator per row, gated column by column by pixel value.

    Pixel intensity scales amplitude linearly; all oscillators start at
    phase 0 and the final mix is peak-normalized to 90% of full scale.
    """
    if params.f_max > sample_rate / 2:
        raise ValueError("f_max above the Nyquist frequency")
    gray = to_grayscale(image)
    if gray.height < 2:
        raise ValueError("image height must be at least 2")
    pixels = gray.as_array()[:, :, 0].astype(np.float64) / 255.0
    total = gray.width * params.samples_per_column
    mix = np.zeros(total)
    if total:
        t = np.arange(total) / sample_rate
        freqs = row_frequencies(gray.height, params)
        for row in range(gray.height):
            amps = pixels[row]
            if not amps.any():
                continue
            envelope = np.repeat(amps, params.samples_per_column)
            mix += envelope * np.sin(2 * np.pi * freqs[row] * t)
        peak = np.abs(mix).max()
        if peak > 0:
            mix *= PEAK_FRACTION * 32767 / peak
    return WavAudio(np.rint(mix).astype(np.int16), sample_rate)


def _stft_magnitude(samples: np.ndarray, params: SpectroParams) -> np.ndarray:
    """Magnitude STFT with frames centered every samples_per_column samples."""
    window = np.hanning(params.fft_size)
    pad = params.fft_size // 2
    padded = np.concatenate([np.zeros(pad), samples, np.zeros(pad)])
    hop = params.samples_per_column
    n_frames = (padded.size - params.fft_size) // hop + 1
    frames = np.lib.stride_tricks.sliding_window_view(padded, params.fft_size)[::hop]
    frames = frames[:n_frames]
    return np.abs(np.fft.rfft(frames * window, axis=1)).T  # (bins, frames)


def spectro_decode(
    audio: WavAudio,
    out_height: int,
    out_width: int,
    params: SpectroParams = SpectroParams(),
) -> RasterImage:
    """Recover the painted image from the audio's magnitude spectrogram.

    Frequencies in [f_min, f_max] are resampled onto out_height rows (row 0
    is f_max) and frames onto out_width columns; magnitudes are scaled so
    the global maximum becomes 255.
    """
    if out_height < 2 or out_width < 1:
        raise ValueError("output raster must be at least 2 rows and 1 column")
    if params.f_max > audio.sample_rate / 2:
        raise ValueError("f_max above the Nyquist frequency")
    if len(audio) < params.fft_size:
        raise AudioTooShort(f"{len(audio)} samples, need at least {params.fft_size}")
    spec = _stft_magnitude(audio.samples.astype(np.float64), params)
    n_bins, n_frames = spec.shape

    # rows: linear interpolation at each target frequency's fractional bin
    bin_pos = row_frequencies(out_height, params) * params.fft_size / audio.sample_rate
    k0 = np.clip(np.floor(bin_pos).astype(int), 0, n_bins - 2)
    kw = bin_pos - k0
    by_row = (1 - kw)[:, None] * spec[k0, :] + kw[:, None] * spec[k0 + 1, :]

    # columns: frames are centered at multiples of the hop
    centers = (np.arange(out_width) + 0.5) * len(audio) / out_width
    frame_pos = centers / params.samples_per_column
    t0 = np.clip(np.floor(frame_pos).astype(int), 0, n_frames - 2)
    tw = frame_pos - t0
    img = (1 - tw)[None, :] * by_row[:, t0] + tw[None, :] * by_row[:, t0 + 1]

    peak = img.max()
    if peak > 0:
        img = img / peak * 255.0
    return RasterImage.from_array(np.rint(img).clip(0, 255).astype(np.uint8))
