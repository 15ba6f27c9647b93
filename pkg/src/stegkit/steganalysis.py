"""Detection side of the toolkit: statistics and signatures.

The chi-square attack exploits what LSB replacement does to a histogram:
writing random bits into bit 0 moves mass between the two values of every
pair (2k, 2k+1) until the pair is balanced. Natural carriers have unequal
pairs, so a tiny chi-square statistic (pairs suspiciously equal) is the
tell. The returned number is the embedding probability: near 1 means the
pairs are as equal as full embedding would make them.

Signature scanning looks for fixed byte patterns that honest files never
show, here: anything appended past a host's end marker, and ZIP local
headers inside that trailer.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHistogram, StegError
from .filesteg import TrailerFinding, ZIP_LOCAL_HEADER, host_boundary, scan_trailer
from .imagesteg import RasterImage, decode_bmp

MIN_EXPECTED_COUNT = 4.0  # pairs with a smaller expectation are dropped, not merged
STEGO_THRESHOLD = 0.95
SUSPICIOUS_THRESHOLD = 0.5


def regularized_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x).

    Series expansion for x < a + 1, Lentz continued fraction otherwise;
    both converge to well below 1e-10 absolute for double inputs.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 0.0
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1:
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(1000):
            denom += 1
            term *= x / denom
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        return min(1.0, max(0.0, total * math.exp(log_prefactor)))
    # continued fraction computes Q(a, x) = 1 - P(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    q = math.exp(log_prefactor) * h
    return min(1.0, max(0.0, 1.0 - q))


def chi_square_statistic(histogram: np.ndarray) -> tuple[float, int]:
    """Pairs-of-values statistic and kept category count for a 256-bin histogram."""
    h = np.asarray(histogram, dtype=np.float64)
    even, odd = h[0::2], h[1::2]
    expected = (even + odd) / 2.0
    keep = expected >= MIN_EXPECTED_COUNT
    kept = int(np.count_nonzero(keep))
    chi2 = float((((even - expected) ** 2)[keep] / expected[keep]).sum())
    return chi2, kept


def chi_square_attack(image: RasterImage) -> float:
    """Embedding probability in [0, 1] from the pairs-of-values test.

    Histogram-only, so it is invariant under any shuffling of sample
    positions. Raises DegenerateHistogram when fewer than two value pairs
    carry enough mass to test.
    """
    samples = np.frombuffer(image.samples, dtype=np.uint8)
    histogram = np.bincount(samples, minlength=256)
    chi2, kept = chi_square_statistic(histogram)
    if kept < 2:
        raise DegenerateHistogram(f"only {kept} value pairs with expected count >= 4")
    df = kept - 1
    return 1.0 - regularized_gamma_p(df / 2.0, chi2 / 2.0)


def chi_square_attack_windowed(image: RasterImage, window: int) -> float:
    """Maximum embedding probability over consecutive sample windows.

    Useful when only a prefix of the carrier was embedded; windows with a
    degenerate histogram are skipped.
    """
    if window < 2:
        raise ValueError("window must be at least 2 samples")
    samples = image.samples
    best = None
    for start in range(0, len(samples), window):
        chunk = samples[start : start + window]
        try:
            p = chi_square_attack(RasterImage(len(chunk), 1, 1, chunk))
        except DegenerateHistogram:
            continue
        best = p if best is None else max(best, p)
    if best is None:
        raise DegenerateHistogram("no window had enough populated value pairs")
    return best


def signature_scan(data: bytes) -> list[TrailerFinding]:
    """Trailer finding plus any ZIP local headers buried past the host boundary."""
    findings = []
    trailer = scan_trailer(data)
    if trailer is not None:
        findings.append(trailer)
    located = host_boundary(data)
    if located is not None:
        host, boundary = located
        at = data.find(ZIP_LOCAL_HEADER, boundary)
        while at != -1:
            findings.append(TrailerFinding(host, at, "zip"))
            at = data.find(ZIP_LOCAL_HEADER, at + 1)
    unique = {f.trailer_offset: f for f in reversed(findings)}
    return sorted(unique.values(), key=lambda f: f.trailer_offset)


# ---------------------------------------------------------------------------
# File and directory reports
# ---------------------------------------------------------------------------


@dataclass
class AnalysisReport:
    target: str
    chi_square_p: float | None
    signatures: list[TrailerFinding]
    verdict: str  # clean | suspicious | stego-detected

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "chi_square_p": self.chi_square_p,
            "signatures": [
                {
                    "host_format": f.host_format,
                    "trailer_offset": f.trailer_offset,
                    "trailer_kind": f.trailer_kind,
                }
                for f in self.signatures
            ],
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_line(self) -> str:
        p = "n/a" if self.chi_square_p is None else f"{self.chi_square_p:.4f}"
        sigs = (
            "; ".join(
                f"{f.trailer_kind} at {f.trailer_offset} ({f.host_format} host)"
                for f in self.signatures
            )
            or "none"
        )
        return f"{self.target}  chi2_p={p}  signatures={sigs}  verdict={self.verdict}"


def verdict_for(
    chi_square_p: float | None,
    signatures: list[TrailerFinding],
    stego_threshold: float = STEGO_THRESHOLD,
    suspicious_threshold: float = SUSPICIOUS_THRESHOLD,
) -> str:
    if signatures or (chi_square_p is not None and chi_square_p >= stego_threshold):
        return "stego-detected"
    if chi_square_p is not None and chi_square_p >= suspicious_threshold:
        return "suspicious"
    return "clean"


def analyze_bytes(data: bytes, target: str = "<bytes>", window: int | None = None) -> AnalysisReport:
    """Run every applicable detector; the chi-square test needs a BMP carrier."""
    chi_p = None
    if data[:2] == b"BM":
        try:
            image = decode_bmp(data)
            if window:
                chi_p = chi_square_attack_windowed(image, window)
            else:
                chi_p = chi_square_attack(image)
        except StegError:
            chi_p = None
    signatures = signature_scan(data)
    return AnalysisReport(target, chi_p, signatures, verdict_for(chi_p, signatures))


def analyze_path(path: str, window: int | None = None) -> list[AnalysisReport]:
    """Analyze one file, or every file under a directory (reports sorted by path)."""
    if os.path.isdir(path):
        targets = []
        for root, dirs, files in os.walk(path):
            dirs.sort()
            targets.extend(os.path.join(root, name) for name in sorted(files))
        targets.sort()
    else:
        targets = [path]
    reports = []
    for target in targets:
        with open(target, "rb") as fh:
            data = fh.read()
        reports.append(analyze_bytes(data, target, window))
    return reports
