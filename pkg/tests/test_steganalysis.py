"""Chi-square LSB attack, incomplete gamma numerics, signature scanning."""

import math

import numpy as np
import pytest
from scipy import integrate

from stegkit.errors import DegenerateHistogram
from stegkit.filesteg import JPEG_EOI, append_embed
from stegkit.imagesteg import RasterImage, encode_bmp, lsb_capacity, lsb_embed
from stegkit.steganalysis import (
    AnalysisReport,
    analyze_bytes,
    analyze_path,
    chi_square_attack,
    chi_square_attack_windowed,
    chi_square_statistic,
    regularized_gamma_p,
    signature_scan,
    verdict_for,
)

from conftest import natural_image, zip_payload


# ---------------------------------------------------------------------------
# Regularized lower incomplete gamma
# ---------------------------------------------------------------------------


def gamma_p_quadrature(a: float, x: float) -> float:
    """Independent oracle: adaptive quadrature of the defining integral."""
    value, _ = integrate.quad(lambda t: t ** (a - 1) * math.exp(-t), 0.0, x, limit=200)
    return value / math.gamma(a)


def test_gamma_p_at_zero():
    for a in (0.5, 1.0, 3.7, 25.0):
        assert regularized_gamma_p(a, 0.0) == 0.0


def test_gamma_p_closed_form_a_equals_one():
    for x in np.linspace(0.1, 10.0, 100):
        assert abs(regularized_gamma_p(1.0, float(x)) - (1 - math.exp(-x))) < 1e-10


def test_gamma_p_against_quadrature():
    assert abs(regularized_gamma_p(2.5, 3.0) - gamma_p_quadrature(2.5, 3.0)) < 1e-8


def test_gamma_p_random_points_against_quadrature():
    rng = np.random.default_rng(0)
    for _ in range(25):
        a = float(rng.uniform(0.6, 20.0))
        x = float(rng.uniform(0.0, 40.0))
        assert abs(regularized_gamma_p(a, x) - gamma_p_quadrature(a, x)) < 1e-8


def test_gamma_p_monotone_in_x():
    for a in (0.7, 1.0, 2.5, 8.0):
        xs = np.linspace(0.0, a + 30.0, 200)
        values = [regularized_gamma_p(a, float(x)) for x in xs]
        assert all(b >= a_ for a_, b in zip(values, values[1:]))


def test_gamma_p_saturates_to_one():
    for a in (0.5, 2.0, 10.0, 40.0):
        assert regularized_gamma_p(a, a + 40 * math.sqrt(a)) >= 1 - 1e-6


def test_gamma_p_domain_checks():
    with pytest.raises(ValueError):
        regularized_gamma_p(0.0, 1.0)
    with pytest.raises(ValueError):
        regularized_gamma_p(1.0, -1.0)


# ---------------------------------------------------------------------------
# Chi-square pairs-of-values attack
# ---------------------------------------------------------------------------


def image_from_counts(counts: dict[int, int]) -> RasterImage:
    """Grayscale image whose histogram is exactly the given counts."""
    samples = bytearray()
    for value, count in counts.items():
        samples += bytes([value]) * count
    return RasterImage(len(samples), 1, 1, bytes(samples))


def test_equal_pairs_give_probability_one():
    counts = {v: 50 for v in range(40)}  # every pair perfectly balanced
    assert chi_square_attack(image_from_counts(counts)) == 1.0


def test_strongly_unequal_pairs_give_near_zero():
    # h(2k) = 2 * h(2k+1) across 50 pairs, about 1e5 samples
    counts = {}
    for k in range(50):
        counts[2 * k] = 1334
        counts[2 * k + 1] = 667
    image = image_from_counts(counts)
    p = chi_square_attack(image)
    # analytic statistic for this construction: per pair e = 1000.5 and
    # one accumulated term (h_even - e)**2 / e = 333.5**2 / 1000.5
    chi2, kept = chi_square_statistic(np.bincount(np.frombuffer(image.samples, np.uint8), minlength=256))
    expected_chi2 = 50 * (333.5**2 / 1000.5)
    assert chi2 == pytest.approx(expected_chi2)
    assert kept == 50
    assert p < 0.01


def test_probability_consistent_with_gamma():
    image = natural_image(3, 64, 64)
    hist = np.bincount(np.frombuffer(image.samples, np.uint8), minlength=256)
    chi2, kept = chi_square_statistic(hist)
    expected = 1.0 - regularized_gamma_p((kept - 1) / 2.0, chi2 / 2.0)
    assert chi_square_attack(image) == pytest.approx(expected, abs=1e-12)


def test_attack_is_permutation_invariant():
    image = natural_image(1, 48, 48)
    rng = np.random.default_rng(0)
    shuffled = np.frombuffer(image.samples, dtype=np.uint8).copy()
    rng.shuffle(shuffled)
    permuted = RasterImage(image.width, image.height, 1, shuffled.tobytes())
    assert chi_square_attack(permuted) == chi_square_attack(image)


def test_monotone_in_pair_imbalance():
    # family h(2k) = (1+delta) * h(2k+1) at fixed total mass per pair
    deltas = [0.0, 0.5, 1.0, 2.0]
    odd_counts = [600, 480, 400, 300]  # chosen so (1+delta)*c is integral, sum 1200
    probs = []
    for delta, c in zip(deltas, odd_counts):
        counts = {}
        for k in range(32):
            counts[2 * k] = int((1 + delta) * c)
            counts[2 * k + 1] = c
        probs.append(chi_square_attack(image_from_counts(counts)))
    assert all(b <= a for a, b in zip(probs, probs[1:]))
    assert probs[0] == 1.0  # delta 0 means perfectly equal pairs


def test_degenerate_histogram():
    with pytest.raises(DegenerateHistogram):
        chi_square_attack(image_from_counts({5: 100}))  # one populated pair
    with pytest.raises(DegenerateHistogram):
        chi_square_attack(RasterImage(3, 1, 1, b"\x01\x02\x03"))  # all pairs below cutoff


def test_detects_full_capacity_embedding():
    rng = np.random.default_rng(99)
    hits = 0
    for seed in range(6):
        cover = natural_image(seed)
        assert chi_square_attack(cover) < 0.95  # clean reads clean
        payload = rng.integers(0, 256, lsb_capacity(cover).usable, dtype=np.uint8).tobytes()
        if chi_square_attack(lsb_embed(cover, payload)) >= 0.95:
            hits += 1
    assert hits == 6


def test_windowed_attack_finds_partial_embedding():
    cover = natural_image(7, 128, 64)
    half = len(cover.samples) // 2
    half_cap = (half // 8) - 12
    rng = np.random.default_rng(5)
    stego = lsb_embed(cover, rng.integers(0, 256, half_cap, dtype=np.uint8).tobytes())
    assert chi_square_attack_windowed(stego, half) >= 0.95
    assert chi_square_attack_windowed(cover, half) < 0.95


# ---------------------------------------------------------------------------
# Signature scanning
# ---------------------------------------------------------------------------


def test_clean_corpus_has_no_findings(fixture_corpus):
    for name, data in fixture_corpus.items():
        assert signature_scan(data) == [], f"false positive on {name}"


def test_appended_zip_is_found_at_boundary(jpeg_cover):
    stego = append_embed(jpeg_cover, zip_payload())
    findings = signature_scan(stego)
    assert len(findings) == 1
    assert findings[0].trailer_kind == "zip"
    assert findings[0].trailer_offset == jpeg_cover.rfind(JPEG_EOI) + 2


def test_bmp_text_trailer_found(bmp_cover):
    findings = signature_scan(append_embed(bmp_cover, b"plain text tail"))
    assert len(findings) == 1
    assert findings[0].trailer_kind == "text"
    assert findings[0].host_format == "bmp"


def test_buried_zip_signature_swept_up(jpeg_cover):
    stego = append_embed(jpeg_cover, b"padding..." + zip_payload())
    findings = signature_scan(stego)
    offsets = [f.trailer_offset for f in findings]
    assert offsets == sorted(offsets)
    assert len(findings) == 2  # the trailer itself plus the buried zip header
    assert findings[1].trailer_kind == "zip"
    assert findings[1].trailer_offset == len(jpeg_cover) + len(b"padding...")


# ---------------------------------------------------------------------------
# Verdicts and reports
# ---------------------------------------------------------------------------


def test_verdict_thresholds():
    assert verdict_for(0.99, []) == "stego-detected"
    assert verdict_for(0.95, []) == "stego-detected"
    assert verdict_for(0.7, []) == "suspicious"
    assert verdict_for(0.5, []) == "suspicious"
    assert verdict_for(0.1, []) == "clean"
    assert verdict_for(None, []) == "clean"
    from stegkit.filesteg import TrailerFinding

    sig = [TrailerFinding("jpeg", 100, "zip")]
    assert verdict_for(None, sig) == "stego-detected"
    assert verdict_for(0.1, sig) == "stego-detected"


def test_analyze_bytes_on_bmp_reports_probability():
    report = analyze_bytes(encode_bmp(natural_image(2)), "x.bmp")
    assert report.chi_square_p is not None
    assert 0.0 <= report.chi_square_p <= 1.0
    assert report.verdict == "clean"


def test_analyze_bytes_json_shape(jpeg_cover):
    report = analyze_bytes(append_embed(jpeg_cover, zip_payload()), "a.jpg")
    d = report.to_dict()
    assert set(d) == {"target", "chi_square_p", "signatures", "verdict"}
    assert d["chi_square_p"] is None  # not a BMP carrier
    assert d["signatures"][0]["trailer_kind"] == "zip"
    assert d["verdict"] == "stego-detected"


def test_analyze_path_directory_sorted(tmp_path, jpeg_cover, png_cover):
    (tmp_path / "b.jpg").write_bytes(jpeg_cover)
    (tmp_path / "a.png").write_bytes(png_cover)
    sub = tmp_path / "sub"
    sub.mkdir()
    (sub / "c.bin").write_bytes(b"whatever")
    reports = analyze_path(str(tmp_path))
    assert [r.target for r in reports] == sorted(r.target for r in reports)
    assert len(reports) == 3
    assert all(isinstance(r, AnalysisReport) for r in reports)
