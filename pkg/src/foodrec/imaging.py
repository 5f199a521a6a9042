"""PPM raster I/O plus the classical colour features used in place of CNNs."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from foodrec.errors import (
    BadHeader,
    BadMagic,
    EmptyImage,
    EmptyPalette,
    MaxvalUnsupported,
    ParseError,
    TruncatedPixelData,
)

KMEANS_MAX_ITER = 50
_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True, eq=False)
class RasterImage:
    width: int
    height: int
    pixels: np.ndarray  # (height * width, 3) uint8, row-major

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8).reshape(-1, 3)
        if len(px) != self.width * self.height:
            raise ValueError(
                f"{len(px)} pixels for a {self.width}x{self.height} image"
            )
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def uniform(cls, width, height, rgb) -> "RasterImage":
        return cls(width, height, np.tile(np.asarray(rgb, dtype=np.uint8), (width * height, 1)))

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self):
        return hash((self.width, self.height, self.pixels.tobytes()))

    def __len__(self):
        return len(self.pixels)


# -- PPM ------------------------------------------------------------------------

def _header_tokens(data: bytes, count: int, pos: int):
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise BadHeader("header ended before width, height and maxval were read")
        tokens.append(data[start:pos])
    return tokens, pos


def parse_ppm(data: bytes) -> RasterImage:
    """Decode a P3 (ASCII) or P6 (binary) pixmap with maxval 255."""
    magic = data[:2]
    if magic not in (b"P3", b"P6"):
        raise BadMagic(f"unsupported magic number {magic!r}")
    if len(data) > 2 and data[2] not in _WHITESPACE and data[2] != ord("#"):
        raise BadMagic("magic number not followed by whitespace")
    tokens, pos = _header_tokens(data, 3, 2)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise BadHeader(f"non-integer header field in {tokens!r}") from exc
    if width < 0 or height < 0:
        raise BadHeader(f"negative image size {width}x{height}")
    if maxval != 255:
        raise MaxvalUnsupported(f"maxval {maxval} is not supported (only 255)")
    n_values = width * height * 3

    if magic == b"P6":
        if n_values and pos >= len(data):
            raise TruncatedPixelData("no pixel data after header")
        payload = data[pos + 1:pos + 1 + n_values]  # single whitespace after maxval
        if len(payload) < n_values:
            raise TruncatedPixelData(f"expected {n_values} bytes, found {len(payload)}")
        values = np.frombuffer(payload, dtype=np.uint8)
    else:
        body = re.sub(rb"#[^\r\n]*", b" ", data[pos:])
        fields = body.split()
        if len(fields) < n_values:
            raise TruncatedPixelData(f"expected {n_values} samples, found {len(fields)}")
        try:
            values = np.array([int(f) for f in fields[:n_values]], dtype=np.int64)
        except ValueError as exc:
            raise ParseError(f"non-integer sample in P3 data: {exc}") from exc
        if values.size and (values.min() < 0 or values.max() > 255):
            raise ParseError("P3 sample outside [0, 255]")
    return RasterImage(width, height, values.astype(np.uint8).reshape(-1, 3))


def write_ppm(image: RasterImage, fmt: str = "P6") -> bytes:
    header = f"{fmt}\n{image.width} {image.height}\n255\n".encode("ascii")
    if fmt == "P6":
        return header + image.pixels.tobytes()
    if fmt == "P3":
        rows = image.pixels.reshape(image.height, image.width * 3) if len(image) else []
        body = "".join(" ".join(str(v) for v in row) + "\n" for row in rows)
        return header + body.encode("ascii")
    raise ValueError(f"unknown PPM format {fmt!r}; use 'P3' or 'P6'")


def read_ppm(path) -> RasterImage:
    return parse_ppm(Path(path).read_bytes())


# -- dominant colour --------------------------------------------------------------

@dataclass(frozen=True)
class ColorPalette:
    entries: tuple[tuple[str, tuple[int, int, int]], ...]

    def __post_init__(self):
        labels = [label for label, _ in self.entries]
        anchors = [tuple(anchor) for _, anchor in self.entries]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate palette labels {labels}")
        if len(set(anchors)) != len(anchors):
            raise ValueError("palette anchors must be distinct")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.entries)

    @property
    def anchors(self) -> np.ndarray:
        return np.array([anchor for _, anchor in self.entries], dtype=float).reshape(-1, 3)

    def to_json(self) -> list[dict]:
        return [{"label": label, "rgb": list(anchor)} for label, anchor in self.entries]

    @classmethod
    def from_json(cls, doc) -> "ColorPalette":
        """Accept ``[{"label": .., "rgb": [r, g, b]}, ...]`` or an ordered ``{label: rgb}`` object."""
        if isinstance(doc, dict):
            items = doc.items()
        else:
            items = ((entry["label"], entry["rgb"]) for entry in doc)
        return cls(tuple((str(label), tuple(int(c) for c in rgb)) for label, rgb in items))


DEFAULT_PALETTE = ColorPalette((("warm", (255, 128, 0)), ("cool", (0, 128, 255))))


def load_palette(path) -> ColorPalette:
    try:
        return ColorPalette.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad palette file: {exc}") from exc


def _initial_centroids(pixels: np.ndarray, k: int) -> np.ndarray:
    # first k distinct colours in row-major order, padded with repeats if fewer exist
    _, first_seen = np.unique(pixels, axis=0, return_index=True)
    distinct = pixels[np.sort(first_seen)]
    if len(distinct) >= k:
        return distinct[:k].astype(float)
    reps = np.resize(np.arange(len(distinct)), k)
    return distinct[reps].astype(float)


def kmeans(pixels: np.ndarray, k: int, max_iter: int = KMEANS_MAX_ITER):
    """Lloyd's algorithm with deterministic initialization.

    Returns ``(centroids, assignments)``. Points go to the nearest centroid
    (lowest index on ties); an empty cluster keeps its previous centroid.
    """
    X = pixels.astype(float)
    centroids = _initial_centroids(pixels, k)
    assign = None
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = np.argmin(d2, axis=1)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            members = X[assign == c]
            if len(members):
                centroids[c] = members.mean(axis=0)
    return centroids, assign


def dominant_color(image: RasterImage, palette: ColorPalette = DEFAULT_PALETTE,
                   k: int = 2, seed: int = 0) -> str:
    """Label of the palette anchor nearest the most populous k-means centroid.

    Initialization is deterministic, so ``seed`` does not change the result;
    it is accepted to keep the call signature uniform with the other
    stochastic stages.
    """
    if len(image) == 0:
        raise EmptyImage("cannot extract a dominant colour from an empty image")
    if not palette.entries:
        raise EmptyPalette("palette has no entries")
    if k < 1:
        raise ValueError("k must be >= 1")
    centroids, assign = kmeans(image.pixels, k)
    sizes = np.bincount(assign, minlength=k)
    centre = centroids[int(np.argmax(sizes))]
    d2 = ((palette.anchors - centre) ** 2).sum(axis=1)
    return palette.labels[int(np.argmin(d2))]


def rgb_histogram(image: RasterImage, bins_per_channel: int = 4) -> np.ndarray:
    """Normalized joint RGB histogram of length ``bins_per_channel ** 3``."""
    if len(image) == 0:
        raise EmptyImage("cannot build a histogram of an empty image")
    b = int(bins_per_channel)
    if b < 1:
        raise ValueError("bins_per_channel must be >= 1")
    q = (image.pixels.astype(np.int64) * b) // 256
    flat = (q[:, 0] * b + q[:, 1]) * b + q[:, 2]
    counts = np.bincount(flat, minlength=b ** 3)
    return counts / counts.sum()
