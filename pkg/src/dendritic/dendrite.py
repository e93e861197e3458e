"""Segments, WTA inhibition, active-dendrite inference, and SDP learning.

A segment is a thresholded dot product: it emits its integer body
potential when that potential reaches the threshold, else 0. A dendrite
is q segments sharing one binary input vector through a p x q synaptic
weight matrix, followed by 1-winner-take-all inhibition. Learning is
spike dependent plasticity (SDP), a binarized plasticity rule keyed on
the (input bit, output bit) pair of every synapse:

    x=0, z=0  ->  no change
    x=0, z=1  ->  w -= backoff   (floor 0)
    x=1, z=0  ->  w += search    (ceiling w_base; no change above it)
    x=1, z=1  ->  w += capture   (ceiling w_max)

All weight quantities are fixed-point integers scaled by
``scale_denominator``, so fractional increments such as 9/16 stay exact.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .core import dot_potential
from .errors import DimensionError, DomainError

__all__ = [
    "Dendrite",
    "SdpParams",
    "WtaOutput",
    "binarize",
    "dendrite_infer",
    "load_weights",
    "same_cluster_bound",
    "save_weights",
    "sdp_update",
    "segment_eval",
    "wta",
]


def _as_scaled(value, denominator: int, name: str) -> int:
    """Convert a fraction-like value to an exact scaled integer."""
    frac = Fraction(value)
    scaled = frac * denominator
    if scaled.denominator != 1:
        raise DomainError(
            f"{name}={value} is not representable with scale denominator {denominator}"
        )
    return int(scaled)


@dataclass(frozen=True)
class SdpParams:
    """SDP learning parameters, all as scaled fixed-point integers.

    ``capture``, ``backoff`` and ``search`` are per-event weight deltas;
    ``w_max`` is the hard weight ceiling, ``w_base`` the initialization
    level and the ceiling the search increment saturates at, and
    ``threshold`` the potential a segment must reach to pass its value.
    """

    capture: int
    backoff: int
    search: int
    w_max: int
    w_base: int
    threshold: int
    scale_denominator: int = 256

    def __post_init__(self):
        if self.scale_denominator < 1:
            raise DomainError("scale_denominator must be a positive integer")
        for name in ("capture", "backoff", "search", "w_max", "w_base", "threshold"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")
        if not self.w_base < self.w_max:
            raise DomainError("w_base must be strictly below w_max")
        if self.search and self.backoff and self.search >= self.backoff:
            warnings.warn(
                "search is usually much smaller than backoff; "
                f"got search={self.search}, backoff={self.backoff} (scaled)",
                stacklevel=2,
            )

    @classmethod
    def from_unscaled(
        cls,
        *,
        capture=1,
        backoff,
        search=0,
        w_max,
        w_base,
        threshold,
        scale_denominator: int = 256,
    ) -> "SdpParams":
        """Build params from model-level units (ints, floats, fractions,
        or strings like "9/16"), scaling each by ``scale_denominator``."""
        s = int(scale_denominator)
        return cls(
            capture=_as_scaled(capture, s, "capture"),
            backoff=_as_scaled(backoff, s, "backoff"),
            search=_as_scaled(search, s, "search"),
            w_max=_as_scaled(w_max, s, "w_max"),
            w_base=_as_scaled(w_base, s, "w_base"),
            threshold=_as_scaled(threshold, s, "threshold"),
            scale_denominator=s,
        )

    def unscaled(self, value: float) -> float:
        return value / self.scale_denominator

    def with_search(self, search) -> "SdpParams":
        return replace(self, search=_as_scaled(search, self.scale_denominator, "search"))


class WtaOutput(NamedTuple):
    """One-hot int vector after WTA inhibition.

    ``values`` has at most one non-zero component, carrying the winning
    potential at the winning segment's position (the cluster identifier).
    ``cid`` is that position, or None when nothing reached threshold.
    """

    values: np.ndarray
    cid: int | None

    @property
    def potential(self) -> int:
        return 0 if self.cid is None else int(self.values[self.cid])


def segment_eval(x, w_col, threshold: int) -> int:
    """Potential of one segment: dot(x, w) if it reaches threshold, else 0."""
    pot = dot_potential(x, w_col)
    return pot if pot >= threshold else 0


def wta(v) -> WtaOutput:
    """1-winner-take-all: keep only the maximum component.

    Ties are broken systematically toward the lowest index. An all-zero
    input produces an all-zero output with no winner.
    """
    vals = np.asarray(v, dtype=np.int64)
    out = np.zeros_like(vals)
    if vals.size == 0:
        return WtaOutput(out, None)
    idx = int(np.argmax(vals))
    if vals[idx] <= 0:
        return WtaOutput(out, None)
    out[idx] = vals[idx]
    return WtaOutput(out, idx)


def dendrite_infer(x, weights, params: SdpParams, proximal: int = 1) -> WtaOutput:
    """Run one inference cycle: per-segment potentials, threshold, WTA.

    ``proximal`` is the 1-bit enable line; when 0 the dendrite is silent
    regardless of the input.
    """
    w = np.asarray(weights)
    if w.ndim != 2:
        raise DimensionError(f"weight matrix must be 2-D, got shape {w.shape}")
    xv = np.asarray(x)
    if xv.shape[0] != w.shape[0]:
        raise DimensionError(
            f"input length {xv.shape[0]} does not match weight rows {w.shape[0]}"
        )
    if not proximal:
        return WtaOutput(np.zeros(w.shape[1], dtype=np.int64), None)
    potentials = xv.astype(np.int64) @ w.astype(np.int64)
    thresholded = np.where(potentials >= params.threshold, potentials, 0)
    return wta(thresholded)


def binarize(z: WtaOutput) -> np.ndarray:
    """Spike form of a WTA output: a single 1 at the winner, if any."""
    bits = np.zeros(z.values.shape[0], dtype=np.uint8)
    if z.cid is not None:
        bits[z.cid] = 1
    return bits


def sdp_update(weights, x, z, params: SdpParams) -> np.ndarray:
    """Apply one SDP step and return the new weight matrix.

    ``x`` is the p-bit input, ``z`` the q-bit binarized dendrite output
    (at most one-hot). The three sub-updates touch disjoint (input bit,
    output bit) pairs, so they are computed as one merged delta.
    """
    w = np.asarray(weights, dtype=np.int64)
    xv = np.asarray(x)
    zv = np.asarray(z)
    if xv.shape[0] != w.shape[0] or zv.shape[0] != w.shape[1]:
        raise DimensionError(
            f"update shapes ({xv.shape[0]}, {zv.shape[0]}) do not match "
            f"weight matrix {w.shape}"
        )
    if int(zv.sum()) > 1:
        raise DomainError("dendrite output must be at most one-hot")
    xb = xv.astype(bool)
    zb = zv.astype(bool)

    new = w.copy()
    if zb.any():
        j = int(np.argmax(zb))
        col = new[:, j]
        col[xb] = np.minimum(col[xb] + params.capture, params.w_max)
        col[~xb] = np.maximum(col[~xb] - params.backoff, 0)
    if params.search:
        rows = xb
        cols = ~zb
        block = new[np.ix_(rows, cols)]
        crept = np.minimum(block + params.search, params.w_base)
        new[np.ix_(rows, cols)] = np.where(block < params.w_base, crept, block)
    return new


def same_cluster_bound(overlap: int, m: int) -> Fraction:
    """Critical backoff below which two consecutive m-spike patterns with
    the given overlap join the same cluster on a fresh dendrite
    (capture = 1). At or above the bound they separate, except that a
    backoff exactly at the bound produces a potential tie, which WTA
    resolves toward the already-captured segment."""
    if m <= 0:
        raise DomainError("m must be positive")
    if overlap < 0 or overlap >= m:
        raise DomainError(
            "overlap must lie in [0, m); identical patterns always co-cluster"
        )
    return Fraction(overlap, m - overlap)


class Dendrite:
    """A q-segment active dendrite with online SDP learning.

    Inference is read-only; ``step`` performs the full per-cycle
    sequence (infer, binarize, update) in the model's order: the output
    reflects the weights before the update.
    """

    def __init__(self, p: int, q: int, params: SdpParams, weights=None):
        if p < 1 or q < 1:
            raise DomainError("dendrite needs at least one input and one segment")
        self.params = params
        if weights is None:
            self.weights = np.full((p, q), params.w_base, dtype=np.int64)
        else:
            self.weights = np.asarray(weights, dtype=np.int64).copy()
            if self.weights.shape != (p, q):
                raise DimensionError(
                    f"weights shape {self.weights.shape} does not match ({p}, {q})"
                )

    @property
    def p(self) -> int:
        return self.weights.shape[0]

    @property
    def q(self) -> int:
        return self.weights.shape[1]

    def potentials(self, x) -> np.ndarray:
        xv = np.asarray(x)
        if xv.shape[0] != self.p:
            raise DimensionError(
                f"input length {xv.shape[0]} does not match dendrite p={self.p}"
            )
        return xv.astype(np.int64) @ self.weights

    def infer(self, x, proximal: int = 1) -> WtaOutput:
        return dendrite_infer(x, self.weights, self.params, proximal)

    def step(self, x, proximal: int = 1, learn: bool = True) -> WtaOutput:
        out = self.infer(x, proximal)
        if learn:
            self.weights = sdp_update(self.weights, x, binarize(out), self.params)
        return out

    def centroid_estimates(self) -> np.ndarray:
        """Per-segment weight columns rescaled to [0, 1] (approximate
        centroids of the clusters each segment has captured)."""
        return self.weights.T / float(self.params.w_max)


_BIN_MAGIC = b"DWM1"


def save_weights(path, weights, scale_denominator: int) -> None:
    """Checkpoint a weight matrix.

    ``.csv`` writes a `p,q,scale_denominator` header line followed by
    one row per input line; anything else writes the flat binary layout
    (magic, three little-endian int64 header words, row-major int64s).
    """
    w = np.asarray(weights, dtype=np.int64)
    if w.ndim != 2:
        raise DimensionError("weight checkpoint requires a 2-D matrix")
    p, q = w.shape
    path = Path(path)
    if path.suffix == ".csv":
        lines = [f"{p},{q},{scale_denominator}"]
        lines += [",".join(str(v) for v in row) for row in w]
        path.write_text("\n".join(lines) + "\n")
    else:
        with open(path, "wb") as fh:
            fh.write(_BIN_MAGIC)
            fh.write(struct.pack("<3q", p, q, scale_denominator))
            fh.write(w.astype("<i8").tobytes(order="C"))


def load_weights(path) -> tuple[np.ndarray, int]:
    """Load a checkpoint written by :func:`save_weights`.

    Returns (weights, scale_denominator).
    """
    path = Path(path)
    if path.suffix == ".csv":
        lines = path.read_text().strip().splitlines()
        p, q, scale = (int(v) for v in lines[0].split(","))
        rows = [[int(v) for v in line.split(",")] for line in lines[1:]]
        w = np.asarray(rows, dtype=np.int64)
        if w.shape != (p, q):
            raise DomainError(f"checkpoint body {w.shape} does not match header ({p}, {q})")
        return w, scale
    data = path.read_bytes()
    if data[:4] != _BIN_MAGIC:
        raise DomainError(f"{path} is not a weight checkpoint")
    p, q, scale = struct.unpack_from("<3q", data, 4)
    w = np.frombuffer(data, dtype="<i8", offset=4 + 24).reshape(p, q)
    return w.astype(np.int64), scale
