import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from foodrec.errors import (
    BadHeader,
    BadMagic,
    EmptyImage,
    EmptyPalette,
    MaxvalUnsupported,
    TruncatedPixelData,
)
from foodrec.imaging import (
    ColorPalette,
    RasterImage,
    dominant_color,
    kmeans,
    parse_ppm,
    rgb_histogram,
    write_ppm,
)

PALETTE = ColorPalette((("warm", (255, 128, 0)), ("cool", (0, 128, 255))))


def random_image(rng, w, h):
    return RasterImage(w, h, rng.integers(0, 256, size=(w * h, 3), dtype=np.uint8))


def test_single_red_pixel_p6():
    img = parse_ppm(b"P6\n1 1\n255\n\xff\x00\x00")
    assert (img.width, img.height) == (1, 1)
    assert img.pixels.tolist() == [[255, 0, 0]]
    assert parse_ppm(write_ppm(img, "P6")) == img
    assert parse_ppm(write_ppm(img, "P3")) == img


def test_p3_and_p6_agree_on_4x4():
    rng = np.random.default_rng(0)
    px = rng.integers(0, 256, size=(16, 3))
    p3 = "P3\n# a comment\n4 4\n255\n" + "\n".join(" ".join(map(str, p)) for p in px) + "\n"
    p6 = b"P6 4 # width\n4\n255\n" + px.astype(np.uint8).tobytes()
    a, b = parse_ppm(p3.encode()), parse_ppm(p6)
    assert a == b
    assert a.pixels.tolist() == px.tolist()


def test_p6_payload_may_start_with_whitespace_byte():
    # payload begins right after the single whitespace following maxval
    px = bytes([10, 32, 9, 13, 10, 35])
    img = parse_ppm(b"P6\n2 1\n255\n" + px)
    assert img.pixels.reshape(-1).tolist() == list(px)


def test_errors():
    with pytest.raises(TruncatedPixelData):
        parse_ppm(b"P6\n2 2\n255\n" + bytes(9))
    with pytest.raises(TruncatedPixelData):
        parse_ppm(b"P3\n2 2\n255\n" + b"0 " * 9)
    with pytest.raises(BadMagic):
        parse_ppm(b"P5\n1 1\n255\n\x00")
    with pytest.raises(BadHeader):
        parse_ppm(b"P6\n1\n")
    with pytest.raises(BadHeader):
        parse_ppm(b"P6\nx 1 255\n\x00\x00\x00")
    with pytest.raises(MaxvalUnsupported):
        parse_ppm(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00")


def test_zero_size_image_roundtrips():
    img = RasterImage(0, 0, np.zeros((0, 3), dtype=np.uint8))
    for fmt in ("P3", "P6"):
        data = write_ppm(img, fmt)
        assert data == f"{fmt}\n0 0\n255\n".encode()
        assert parse_ppm(data) == img


def test_random_roundtrips_16x16():
    rng = np.random.default_rng(1)
    img = random_image(rng, 16, 16)
    for fmt in ("P3", "P6"):
        assert parse_ppm(write_ppm(img, fmt)) == img


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 12), st.integers(0, 12), st.integers(0, 2**32 - 1), st.sampled_from(["P3", "P6"]))
def test_roundtrip_property(w, h, seed, fmt):
    img = random_image(np.random.default_rng(seed), w, h)
    assert parse_ppm(write_ppm(img, fmt)) == img


def test_dominant_color_uniform_images():
    assert dominant_color(RasterImage.uniform(3, 3, (255, 0, 0)), PALETTE, 2) == "warm"
    assert dominant_color(RasterImage.uniform(3, 3, (0, 128, 255)), PALETTE, 2) == "cool"


def two_color_image(n_warm=70, n_cool=30, shuffle_seed=None):
    px = np.array([(250, 60, 30)] * n_warm + [(20, 40, 230)] * n_cool, dtype=np.uint8)
    if shuffle_seed is not None:
        px = np.random.default_rng(shuffle_seed).permutation(px)
    return RasterImage(10, (n_warm + n_cool) // 10, px)


def test_seventy_thirty_k2():
    img = two_color_image()
    centroids, assign = kmeans(img.pixels, 2)
    # two-cluster k-means converges to the two pure colours
    assert sorted(map(tuple, centroids.tolist())) == [(20.0, 40.0, 230.0), (250.0, 60.0, 30.0)]
    assert sorted(np.bincount(assign).tolist()) == [30, 70]
    assert dominant_color(img, PALETTE, k=2, seed=0) == "warm"
    flipped = two_color_image(30, 70)
    assert dominant_color(flipped, PALETTE, k=2) == "cool"


def test_dominant_color_permutation_invariant():
    for s in range(5):
        assert dominant_color(two_color_image(shuffle_seed=s), PALETTE, 2) == "warm"


def test_fewer_distinct_colours_than_k():
    assert dominant_color(RasterImage.uniform(2, 2, (0, 120, 250)), PALETTE, k=4) == "cool"


def test_anchor_tie_prefers_earlier_entry():
    pal = ColorPalette((("a", (0, 0, 0)), ("b", (2, 2, 2))))
    assert dominant_color(RasterImage.uniform(1, 1, (1, 1, 1)), pal, 1) == "a"


def test_dominant_color_errors():
    empty = RasterImage(0, 0, np.zeros((0, 3), dtype=np.uint8))
    with pytest.raises(EmptyImage):
        dominant_color(empty, PALETTE)
    with pytest.raises(EmptyPalette):
        dominant_color(RasterImage.uniform(1, 1, (0, 0, 0)), ColorPalette(()))


def test_histogram_examples():
    uni = rgb_histogram(RasterImage.uniform(3, 2, (10, 200, 99)), 4)
    assert len(uni) == 64 and uni.max() == 1.0 and np.count_nonzero(uni) == 1
    img = RasterImage(2, 2, [(255, 0, 0), (255, 0, 0), (0, 0, 255), (0, 0, 255)])
    h = rgb_histogram(img, 2)
    # red -> (1,0,0) -> index 4, blue -> (0,0,1) -> index 1
    assert h.tolist() == [0, 0.5, 0, 0, 0.5, 0, 0, 0]
    rng = np.random.default_rng(3)
    assert rgb_histogram(random_image(rng, 5, 5), 1).tolist() == [1.0]
    with pytest.raises(EmptyImage):
        rgb_histogram(RasterImage(0, 0, np.zeros((0, 3), dtype=np.uint8)), 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_histogram_normalized_and_permutation_invariant(w, h, b, seed):
    rng = np.random.default_rng(seed)
    img = random_image(rng, w, h)
    hist = rgb_histogram(img, b)
    assert len(hist) == b ** 3
    assert (hist >= 0).all()
    assert abs(hist.sum() - 1.0) <= np.finfo(float).eps * b ** 3
    shuffled = RasterImage(w, h, rng.permutation(img.pixels))
    assert np.array_equal(rgb_histogram(shuffled, b), hist)
