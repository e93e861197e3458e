"""Dataset ingestion and generation.

Covers the three input families the experiment harness understands:
IDX image/label files (the classic MNIST container format), waveform
records in CSV or JSON-lines form, and two offline-friendly bundled
sources: a synthetic spike-sorting benchmark (parameterized templates
with amplitude noise and uneven temporal mixing, so clustering
experiments run without the original recordings) and the scikit-learn
8x8 digits set as a desk-scale stand-in for MNIST.
"""

from __future__ import annotations

import gzip
import json
import os
import struct
from pathlib import Path

import numpy as np

from .errors import DomainError, InputError

__all__ = [
    "find_mnist",
    "load_digits_surrogate",
    "load_mnist",
    "read_idx",
    "read_waveforms",
    "synthetic_spike_benchmark",
    "write_idx",
    "write_waveforms_csv",
    "write_waveforms_jsonl",
]

_IDX_DTYPES = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}


def _open_maybe_gzip(path, mode: str):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, mode)
    return open(path, mode)


def read_idx(path) -> np.ndarray:
    """Read an IDX-format array (gzipped or plain).

    The header is big-endian: two zero bytes, a dtype code, the number
    of dimensions, then one 32-bit size per dimension. MNIST image
    files carry magic 2051 (uint8, 3-D) and label files 2049 (uint8,
    1-D); both are just instances of this layout.
    """
    with _open_maybe_gzip(path, "rb") as fh:
        header = fh.read(4)
        if len(header) < 4 or header[0] != 0 or header[1] != 0:
            raise InputError(f"{path}: not an IDX file (bad magic {header!r})")
        dtype_code, ndim = header[2], header[3]
        if dtype_code not in _IDX_DTYPES:
            raise InputError(f"{path}: unknown IDX dtype code 0x{dtype_code:02x}")
        dims = struct.unpack(f">{ndim}I", fh.read(4 * ndim))
        dtype = _IDX_DTYPES[dtype_code]
        count = int(np.prod(dims)) if ndim else 1
        data = np.frombuffer(fh.read(count * dtype.itemsize), dtype=dtype, count=count)
        if data.size != count:
            raise InputError(f"{path}: truncated IDX payload")
        return data.reshape(dims).astype(dtype.newbyteorder("="))


def write_idx(path, array) -> None:
    """Write an array in IDX format (uint8 payloads only)."""
    arr = np.ascontiguousarray(np.asarray(array, dtype=np.uint8))
    with _open_maybe_gzip(path, "wb") as fh:
        fh.write(bytes([0, 0, 0x08, arr.ndim]))
        fh.write(struct.pack(f">{arr.ndim}I", *arr.shape))
        fh.write(arr.tobytes(order="C"))


_MNIST_FILES = {
    "train_images": ("train-images-idx3-ubyte", "train-images.idx3-ubyte"),
    "train_labels": ("train-labels-idx1-ubyte", "train-labels.idx1-ubyte"),
    "test_images": ("t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"),
    "test_labels": ("t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"),
}


def find_mnist(directory=None) -> Path | None:
    """Locate a directory holding the four MNIST IDX files, if any.

    Checks the explicit argument, then $DENDRITIC_MNIST, then
    ``./data/mnist``. Returns None when the files are absent.
    """
    candidates = []
    if directory:
        candidates.append(Path(directory))
    env = os.environ.get("DENDRITIC_MNIST")
    if env:
        candidates.append(Path(env))
    candidates.append(Path("data/mnist"))
    for base in candidates:
        if not base.is_dir():
            continue
        if all(
            any((base / name).exists() or (base / (name + ".gz")).exists() for name in names)
            for names in _MNIST_FILES.values()
        ):
            return base
    return None


def load_mnist(directory) -> dict[str, np.ndarray]:
    """Load the four MNIST arrays from a directory of IDX files."""
    base = Path(directory)
    out = {}
    for key, names in _MNIST_FILES.items():
        for name in names:
            for candidate in (base / name, base / (name + ".gz")):
                if candidate.exists():
                    out[key] = read_idx(candidate)
                    break
            if key in out:
                break
        else:
            raise InputError(f"missing MNIST file {names[0]}[.gz] in {base}")
    if out["train_images"].shape[0] != out["train_labels"].shape[0]:
        raise InputError("train image/label counts differ")
    if out["test_images"].shape[0] != out["test_labels"].shape[0]:
        raise InputError("test image/label counts differ")
    return out


def load_digits_surrogate() -> tuple[np.ndarray, np.ndarray]:
    """The bundled 8x8 handwritten-digit set (1797 images, levels 0-16).

    Ships with scikit-learn, so it is available offline; used as the
    desk-scale surrogate when the real MNIST files are not on disk.
    """
    from sklearn.datasets import load_digits

    data = load_digits()
    return data.images.astype(np.uint8), data.target.astype(np.int64)


def read_waveforms(path) -> tuple[list[np.ndarray], np.ndarray | None]:
    """Read spike-event records from a ``.csv`` or ``.jsonl`` file.

    CSV rows are comma-separated sample values; if the file starts with
    a header whose first column is ``label``, the first value of every
    row is the ground-truth label. JSONL records are objects with a
    ``samples`` array and an optional ``label``. Returns (waveforms,
    labels-or-None); parse failures report the offending line.
    """
    path = Path(path)
    suffix = path.suffixes[0] if path.suffixes else ""
    if suffix == ".jsonl":
        return _read_waveforms_jsonl(path)
    if suffix == ".csv":
        return _read_waveforms_csv(path)
    raise InputError(f"unsupported waveform file type: {path.name}")


def _read_waveforms_csv(path) -> tuple[list[np.ndarray], np.ndarray | None]:
    waveforms: list[np.ndarray] = []
    labels: list[int] = []
    has_labels = False
    with _open_maybe_gzip(path, "rt") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if lineno == 1 and line.split(",")[0].strip().lower() == "label":
                has_labels = True
                continue
            fields = line.split(",")
            try:
                values = [float(v) for v in fields]
            except ValueError as exc:
                raise InputError(f"{path.name}: {exc}", line=lineno) from None
            if has_labels:
                labels.append(int(values[0]))
                values = values[1:]
            if not values:
                raise InputError(f"{path.name}: empty sample row", line=lineno)
            waveforms.append(np.asarray(values))
    return waveforms, (np.asarray(labels, dtype=np.int64) if has_labels else None)


def _read_waveforms_jsonl(path) -> tuple[list[np.ndarray], np.ndarray | None]:
    waveforms: list[np.ndarray] = []
    labels: list[int] = []
    any_label = False
    with _open_maybe_gzip(path, "rt") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                samples = record["samples"]
            except (json.JSONDecodeError, TypeError, KeyError) as exc:
                raise InputError(f"{path.name}: {exc}", line=lineno) from None
            waveforms.append(np.asarray(samples, dtype=np.float64))
            if "label" in record and record["label"] is not None:
                labels.append(int(record["label"]))
                any_label = True
            elif any_label:
                raise InputError(
                    f"{path.name}: label missing after labeled records", line=lineno
                )
    return waveforms, (np.asarray(labels, dtype=np.int64) if any_label else None)


def write_waveforms_csv(path, waveforms, labels=None) -> None:
    lines = []
    if labels is not None:
        width = max(len(w) for w in waveforms)
        lines.append("label," + ",".join(f"s{i}" for i in range(width)))
    for i, wf in enumerate(waveforms):
        row = ",".join(str(int(v)) for v in wf)
        if labels is not None:
            row = f"{int(labels[i])},{row}"
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n")


def write_waveforms_jsonl(path, waveforms, labels=None) -> None:
    with open(path, "w") as fh:
        for i, wf in enumerate(waveforms):
            record = {"samples": [int(v) for v in wf]}
            if labels is not None:
                record["label"] = int(labels[i])
            fh.write(json.dumps(record) + "\n")


# Synthetic spike templates: (peak amplitude, peak width, trough depth,
# trough offset, trough width, recovery bump) in raw sample units.
# Chosen so the six downsampled shapes are mutually well separated.
_TEMPLATE_SHAPES = (
    (900.0, 2.6, -260.0, 6.0, 4.5, 60.0),
    (660.0, 4.4, -80.0, 9.0, 7.0, 20.0),
    (520.0, 2.2, -320.0, 5.0, 3.5, 90.0),
    (820.0, 6.5, -150.0, 11.0, 8.0, 0.0),
    (430.0, 3.4, -40.0, 7.5, 5.0, 130.0),
    (740.0, 1.8, -420.0, 4.0, 6.5, 40.0),
)


def spike_template(index: int, raw_len: int = 48, peak: int = 24) -> np.ndarray:
    """Noise-free waveform of one synthetic neuron, as float samples."""
    amp, width, trough, t_off, t_width, bump = _TEMPLATE_SHAPES[
        index % len(_TEMPLATE_SHAPES)
    ]
    t = np.arange(raw_len, dtype=np.float64) - peak
    wave = amp * np.exp(-0.5 * (t / width) ** 2)
    wave += trough * np.exp(-0.5 * ((t - t_off) / t_width) ** 2)
    wave += bump * np.exp(-0.5 * ((t - t_off - 8.0) / 6.0) ** 2)
    return wave


def synthetic_spike_benchmark(
    n_spikes: int = 10390,
    n_templates: int = 6,
    seed: int = 0,
    amplitude_jitter: float = 0.035,
    noise_sd: float = 9.0,
    segment_mean: int = 350,
    raw_len: int = 48,
    peak: int = 24,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Generate a labeled spike stream with uneven temporal mixing.

    The stream is a sequence of segments; within each segment only one
    or two of the template neurons fire, mimicking recordings where
    individual neurons dominate extended stretches of time. Every spike
    is its template shape with multiplicative amplitude jitter and
    additive sample noise, rounded to integer "voltage" samples.

    Returns (waveforms (n, raw_len) int64, labels (n,), peak index).
    """
    if n_templates < 1 or n_templates > len(_TEMPLATE_SHAPES):
        raise DomainError(f"n_templates must be in [1, {len(_TEMPLATE_SHAPES)}]")
    if n_spikes < 0:
        raise DomainError("n_spikes must be non-negative")
    rng = np.random.default_rng(seed)
    templates = np.stack(
        [spike_template(k, raw_len, peak) for k in range(n_templates)]
    )

    labels = np.empty(n_spikes, dtype=np.int64)
    filled = 0
    rotation: list[int] = []
    while filled < n_spikes:
        if not rotation:
            rotation = list(rng.permutation(n_templates))
        active = [rotation.pop()]
        if n_templates > 1 and rng.random() < 0.5:
            if not rotation:
                rotation = list(rng.permutation(n_templates))
            active.append(rotation.pop())
        seg_len = min(
            n_spikes - filled, max(30, int(rng.geometric(1.0 / segment_mean)))
        )
        labels[filled : filled + seg_len] = rng.choice(active, size=seg_len)
        filled += seg_len

    gains = rng.normal(1.0, amplitude_jitter, size=n_spikes)
    noise = rng.normal(0.0, noise_sd, size=(n_spikes, raw_len))
    waves = templates[labels] * gains[:, None] + noise
    return np.round(waves).astype(np.int64), labels, peak
