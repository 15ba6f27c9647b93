"""Shared fixtures: deterministic carrier generators and host-file covers."""

import io
import zipfile

import numpy as np
import pytest
from PIL import Image

from stegkit.imagesteg import RasterImage


def natural_image(seed: int, width: int = 96, height: int = 96) -> RasterImage:
    """Grayscale carrier with the statistics of a processed photograph.

    A smooth random field is quantized to a few dozen levels and stretched
    back to 8 bits, which combs the histogram the way contrast-stretched
    photos comb it: adjacent value pairs get very unequal counts. That
    asymmetry is exactly what the chi-square attack keys on, so clean
    carriers score near 0 and fully embedded ones near 1.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    field = np.zeros((height, width))
    for _ in range(6):
        fx, fy = rng.uniform(0.5, 3.0, 2)
        px, py = rng.uniform(0, 2 * np.pi, 2)
        field += rng.uniform(0.3, 1.0) * np.sin(2 * np.pi * fx * xx / width + px) * np.sin(
            2 * np.pi * fy * yy / height + py
        )
    noise = rng.normal(0, 1, (height, width))
    for _ in range(3):
        noise = (
            noise
            + np.roll(noise, 1, 0)
            + np.roll(noise, -1, 0)
            + np.roll(noise, 1, 1)
            + np.roll(noise, -1, 1)
        ) / 5
    field += 0.4 * noise
    field = (field - field.min()) / (field.max() - field.min() + 1e-12)
    levels = int(rng.integers(48, 112))
    quantized = np.floor(field * (levels - 1) + 0.5)
    stretched = np.rint(quantized * (255.0 / (levels - 1))).astype(np.uint8)
    return RasterImage.from_array(stretched)


def random_image(seed: int, width: int, height: int, channels: int = 3) -> RasterImage:
    rng = np.random.default_rng(seed)
    shape = (height, width) if channels == 1 else (height, width, channels)
    return RasterImage.from_array(rng.integers(0, 256, shape, dtype=np.uint8))


def pil_image_bytes(seed: int, fmt: str, size: tuple[int, int] = (48, 32)) -> bytes:
    """A small photographic-looking file written by an independent codec."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0 : size[1], 0 : size[0]]
    r = 128 + 90 * np.sin(xx / 7 + rng.uniform(0, 6))
    g = 128 + 90 * np.sin(yy / 5 + rng.uniform(0, 6))
    b = 128 + 90 * np.sin((xx + yy) / 9 + rng.uniform(0, 6))
    arr = np.stack([r, g, b], axis=-1).clip(0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format=fmt)
    return buf.getvalue()


def zip_payload(names_and_data: dict[str, bytes] | None = None) -> bytes:
    """A real ZIP archive; its first bytes are the PK local header signature."""
    buf = io.BytesIO()
    entries = names_and_data or {"hidden.txt": b"The password is 1234567890"}
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, data in entries.items():
            zf.writestr(name, data)
    return buf.getvalue()


@pytest.fixture(scope="session")
def jpeg_cover() -> bytes:
    return pil_image_bytes(11, "JPEG")


@pytest.fixture(scope="session")
def png_cover() -> bytes:
    return pil_image_bytes(22, "PNG")


@pytest.fixture(scope="session")
def bmp_cover() -> bytes:
    return pil_image_bytes(33, "BMP")


@pytest.fixture(scope="session")
def fixture_corpus(jpeg_cover, png_cover, bmp_cover) -> dict[str, bytes]:
    """Unmodified host files of every supported format."""
    return {
        "photo.jpg": jpeg_cover,
        "chart.png": png_cover,
        "scan.bmp": bmp_cover,
        "photo2.jpg": pil_image_bytes(44, "JPEG"),
        "chart2.png": pil_image_bytes(55, "PNG"),
        "scan2.bmp": pil_image_bytes(66, "BMP"),
    }
