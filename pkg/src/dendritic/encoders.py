"""Frontend transforms that turn raw inputs into spike vectors.

Two encoding chains live here. The waveform chain (framing, block
downsampling, amplitude scaling, one-hot pixel conversion, m-hot
similarity coding) prepares spike-sorting inputs for a clustering
dendrite. The image chain (black-and-white conversion, overlapping
receptive fields, checkerboard subsampling, two-rail expansion)
prepares images for classification networks. Both emit constant-weight
or near-constant-weight bit vectors, which is what makes the dot
product a valid nearest-centroid surrogate downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "FrameParams",
    "RfEncoding",
    "binarize_image",
    "checkerboard_mask",
    "frame_waveform",
    "mhot_code",
    "rf_extract",
    "similarity_encode",
    "to_pixels",
    "two_rail",
]


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5).astype(np.int64)


@dataclass(frozen=True)
class FrameParams:
    """Waveform framing parameters.

    precision: bits of amplitude resolution (levels = 2**precision)
    before/after: downsampled sample counts kept around the spike peak
    stride/window: step and width, in raw samples, of block downsampling
    aggregate: window reduction, "mean" (rounded half-up) or "max"
    """

    precision: int
    before: int
    after: int
    stride: int
    window: int
    aggregate: str = "mean"

    def __post_init__(self):
        if self.precision < 1:
            raise DomainError("precision must be at least 1 bit")
        if self.before < 0 or self.after < 0:
            raise DomainError("before/after must be non-negative")
        if self.stride < 1 or self.window < 1:
            raise DomainError("stride and window must be at least 1")
        if self.aggregate not in ("mean", "max"):
            raise DomainError(f"unknown aggregate {self.aggregate!r}")

    @property
    def frame_len(self) -> int:
        return self.before + self.after + 1

    @property
    def levels(self) -> int:
        return 2**self.precision

    @property
    def frame_size(self) -> int:
        """Bit count of one encoded frame: 2^precision * (before+after+1)."""
        return self.levels * self.frame_len


def frame_waveform(
    samples,
    peak_index: int,
    fp: FrameParams,
    global_min: float,
    global_max: float,
) -> tuple[np.ndarray, bool]:
    """Frame, block-downsample, and amplitude-scale one waveform.

    Keeps ``before + after + 1`` points centered on the peak, one per
    stride step, each the aggregate of a window of raw samples, then
    rescales linearly so [global_min, global_max] maps onto
    [0, 2^precision - 1]. The global extremes come from a calibration
    pass over the whole dataset, so individual frames share one scale.

    Returns (frame, padded); ``padded`` flags edge replication where the
    requested region ran past the signal bounds.
    """
    sig = np.asarray(samples, dtype=np.float64)
    if sig.ndim != 1 or sig.size == 0:
        raise DimensionError("waveform must be a non-empty 1-D sample vector")
    if not 0 <= peak_index < sig.size:
        raise DomainError(f"peak index {peak_index} outside waveform of {sig.size}")
    if not global_min < global_max:
        raise DomainError("degenerate amplitude range: global_min must be < global_max")

    half = (fp.window - 1) // 2
    centers = peak_index + fp.stride * np.arange(-fp.before, fp.after + 1)
    lo = centers - half
    hi = lo + fp.window
    padded = bool(lo.min() < 0 or hi.max() > sig.size)
    idx = np.clip(np.arange(lo.min(), hi.max()), 0, sig.size - 1)
    ext = sig[idx]
    offsets = lo - lo.min()
    windows = ext[offsets[:, None] + np.arange(fp.window)[None, :]]
    if fp.aggregate == "mean":
        reduced = _round_half_up(windows.mean(axis=1))
    else:
        reduced = windows.max(axis=1).astype(np.int64)

    top = fp.levels - 1
    scaled = _round_half_up((reduced - global_min) / (global_max - global_min) * top)
    return np.clip(scaled, 0, top), padded


def flip_frame(frame, precision: int) -> np.ndarray:
    """Top-to-bottom amplitude flip of a framed vector: v -> top - v."""
    return (2**precision - 1) - np.asarray(frame, dtype=np.int64)


def to_pixels(frame, precision: int) -> np.ndarray:
    """One-hot pixel image of a framed vector.

    Rows index amplitude (row 0 = level 0, the bottom), columns index
    time; exactly one pixel per column is set.
    """
    vals = np.asarray(frame, dtype=np.int64)
    levels = 2**precision
    if vals.ndim != 1:
        raise DimensionError("frame must be 1-D")
    if (vals < 0).any() or (vals >= levels).any():
        raise DomainError(f"frame values outside [0, {levels - 1}]")
    img = np.zeros((levels, vals.size), dtype=np.uint8)
    img[vals, np.arange(vals.size)] = 1
    return img


def mhot_code(value: int, length: int, hotness: int) -> np.ndarray:
    """m-hot code of a scalar: ones at ``hotness`` consecutive positions
    centered on ``value``, clipped at the vector edges.

    With hotness 1 this is the plain one-hot code. The sad distance
    between two m-hot codes grows as 2*|a-b| until it saturates at
    2*hotness, so it carries similarity information one-hot codes lack.
    """
    if hotness < 1 or hotness % 2 == 0:
        raise DomainError("hotness must be odd and >= 1")
    if not 0 <= value < length:
        raise DomainError(f"value {value} outside [0, {length})")
    out = np.zeros(length, dtype=np.uint8)
    half = hotness // 2
    out[max(0, value - half) : min(length, value + half + 1)] = 1
    return out


def similarity_encode(img, row_hot: int, col_hot: int) -> np.ndarray:
    """Dilate every set pixel to a cross-product neighborhood.

    ``col_hot`` is the vertical hotness (pixels spread within a column,
    across amplitude rows); ``row_hot`` the horizontal hotness (within a
    row, across time columns). Both must be odd; (1, 1) is the identity.
    Dilation clips at the image edges, and overlapping neighborhoods
    merge by OR.
    """
    if row_hot < 1 or row_hot % 2 == 0 or col_hot < 1 or col_hot % 2 == 0:
        raise DomainError("row and column hotness must be odd and >= 1")
    src = np.asarray(img, dtype=np.uint8)
    if src.ndim != 2:
        raise DimensionError("pixel image must be 2-D")
    out = np.zeros_like(src)
    n_rows, n_cols = src.shape
    for dr in range(-(col_hot // 2), col_hot // 2 + 1):
        r_src = slice(max(0, -dr), min(n_rows, n_rows - dr))
        r_dst = slice(max(0, dr), min(n_rows, n_rows + dr))
        for dc in range(-(row_hot // 2), row_hot // 2 + 1):
            c_src = slice(max(0, -dc), min(n_cols, n_cols - dc))
            c_dst = slice(max(0, dc), min(n_cols, n_cols + dc))
            out[r_dst, c_dst] |= src[r_src, c_src]
    return out


def binarize_image(gray, threshold: int) -> np.ndarray:
    """Black-and-white conversion: pixel >= threshold becomes 1."""
    return (np.asarray(gray) >= threshold).astype(np.uint8)


def checkerboard_mask(rf_size: int = 5) -> tuple[tuple[int, int], ...]:
    """Checkerboard pixel selection: every even (row, col) position.

    For a 5x5 receptive field this is the symmetric 9-of-25 pattern.
    """
    return tuple(
        (r, c) for r in range(0, rf_size, 2) for c in range(0, rf_size, 2)
    )


def two_rail(bits) -> np.ndarray:
    """Two-rail expansion: each bit b becomes the pair [b, 1-b].

    Output spike count equals the input length regardless of content,
    i.e. the code is constant weight by construction.
    """
    b = np.asarray(bits, dtype=np.uint8)
    out = np.empty(b.shape[:-1] + (2 * b.shape[-1],), dtype=np.uint8)
    out[..., 0::2] = b
    out[..., 1::2] = 1 - b
    return out


@dataclass(frozen=True)
class RfEncoding:
    """Receptive-field encoding for image classification.

    Every overlapping rf_size x rf_size window of the binary image
    becomes one receptive field; ``mask`` selects which of its pixels
    feed the network (default: the 9-point checkerboard on a 5x5 RF),
    and two-rail expansion doubles them into a constant-weight code.
    """

    rf_size: int = 5
    mask: tuple[tuple[int, int], ...] = field(default_factory=checkerboard_mask)
    use_two_rail: bool = True

    def __post_init__(self):
        if self.rf_size < 1:
            raise DomainError("rf_size must be positive")
        for r, c in self.mask:
            if not (0 <= r < self.rf_size and 0 <= c < self.rf_size):
                raise DomainError(f"mask offset ({r}, {c}) outside RF")
        if len(set(self.mask)) != len(self.mask):
            raise DomainError("mask offsets must be unique")

    @property
    def bits_per_rf(self) -> int:
        return 2 * len(self.mask) if self.use_two_rail else len(self.mask)

    @property
    def spikes_per_rf(self) -> int:
        """Spike count of one encoded RF (two-rail makes it constant)."""
        return len(self.mask)

    def rf_count(self, image_shape: tuple[int, int]) -> int:
        h, w = image_shape
        if h < self.rf_size or w < self.rf_size:
            raise DimensionError(
                f"image {image_shape} smaller than {self.rf_size}x{self.rf_size} RF"
            )
        return (h - self.rf_size + 1) * (w - self.rf_size + 1)


def rf_extract(image, enc: RfEncoding) -> np.ndarray:
    """Encode a binary image into one spike vector per receptive field.

    Returns an (rf_count, bits_per_rf) uint8 array, RFs in row-major
    order of their top-left corners. A 28x28 image with 5x5 RFs yields
    576 rows of 18 bits, each with exactly 9 spikes.
    """
    img = np.asarray(image, dtype=np.uint8)
    if img.ndim != 2:
        raise DimensionError("image must be 2-D")
    n = enc.rf_count(img.shape)
    windows = np.lib.stride_tricks.sliding_window_view(
        img, (enc.rf_size, enc.rf_size)
    ).reshape(n, enc.rf_size, enc.rf_size)
    rows = [r for r, _ in enc.mask]
    cols = [c for _, c in enc.mask]
    picked = windows[:, rows, cols]
    return two_rail(picked) if enc.use_two_rail else np.ascontiguousarray(picked)
