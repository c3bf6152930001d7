"""Constant-Q spectrogram and 12-bin chromagram.

The CQT uses the sparse spectral-kernel formulation: every bin owns a
Hann-windowed complex exponential whose length is inversely proportional to
its centre frequency, so all bins share one quality factor. The kernels are
transformed once per configuration, thresholded at 0.5 % of their peak
magnitude and stored as a sparse matrix; each analysis frame then costs one
real FFT plus a sparse product.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, TextIO

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import sparse

from .audio_io import AudioChunk
from .errors import ConfigError, StructuralError

PITCH_CLASS_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")

C1_HZ = 440.0 * 2.0 ** (-45 / 12)  # 32.703 Hz
KERNEL_THRESHOLD = 0.005
_FRAME_BATCH = 32


@dataclass(frozen=True)
class CqtConfig:
    """Constant-Q analysis parameters.

    ``filter_scale`` stretches every kernel by the same factor, raising Q
    above the minimum ``1 / (2**(1/bins_per_octave) - 1)``. At 12 bins per
    octave a scale of 2 puts each neighbouring semitone on the first zero of
    the Hann response, which keeps a tone from bleeding into the adjacent
    pitch class (the major/minor third decision hinges on exactly that).
    """

    f_min: float = C1_HZ
    bins_per_octave: int = 12
    n_octaves: int = 7
    hop_length: int = 512
    filter_scale: float = 2.0

    def __post_init__(self):
        if self.bins_per_octave <= 0 or self.bins_per_octave % 12:
            raise ConfigError(f"bins_per_octave must be a positive multiple of 12, got {self.bins_per_octave}")
        if self.n_octaves < 1:
            raise ConfigError("n_octaves must be at least 1")
        if self.hop_length < 1:
            raise ConfigError("hop_length must be at least 1")
        if not self.f_min > 0 or not self.filter_scale > 0:
            raise ConfigError("f_min and filter_scale must be positive")

    @property
    def n_bins(self) -> int:
        return self.bins_per_octave * self.n_octaves

    @property
    def q_factor(self) -> float:
        return self.filter_scale / (2.0 ** (1.0 / self.bins_per_octave) - 1.0)

    def frequencies(self) -> np.ndarray:
        return self.f_min * 2.0 ** (np.arange(self.n_bins) / self.bins_per_octave)

    def pitch_classes(self) -> np.ndarray:
        """Pitch class (0 = C) of every bin, by nearest equal-tempered note."""
        midi = 69 + 12 * np.log2(self.frequencies() / 440.0)
        return np.round(midi).astype(int) % 12

    def check_sample_rate(self, sample_rate: int) -> None:
        if self.f_min * 2.0 ** self.n_octaves >= sample_rate / 2:
            raise ConfigError(
                f"CQT range tops out at {self.f_min * 2.0 ** self.n_octaves:.1f} Hz, "
                f"not below Nyquist ({sample_rate / 2:.1f} Hz)"
            )


@dataclass(frozen=True, eq=False)
class Chromagram:
    """12 x N pitch-class intensities, rows C..B, one column per frame."""

    values: np.ndarray
    frame_rate: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != 12:
            raise StructuralError(f"chromagram must be 12 x N, got shape {v.shape}")
        if not np.all(np.isfinite(v)) or v.min(initial=0.0) < 0 or v.max(initial=0.0) > 1.0:
            raise StructuralError("chromagram values must lie in [0, 1]")
        object.__setattr__(self, "values", v)

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class CqtKernel:
    config: CqtConfig
    sample_rate: int
    fft_length: int
    matrix: sparse.csr_matrix  # (fft_length // 2 + 1) x n_bins, conjugated and scaled

    @property
    def density(self) -> float:
        return self.matrix.nnz / (self.matrix.shape[0] * self.matrix.shape[1])


@lru_cache(maxsize=8)
def cqt_kernel(config: CqtConfig, sample_rate: int) -> CqtKernel:
    """Build (and cache) the sparse spectral kernel for a config and rate."""
    config.check_sample_rate(sample_rate)
    freqs = config.frequencies()
    lengths = config.q_factor * sample_rate / freqs
    fft_length = 1 << math.ceil(math.log2(lengths.max()))
    n_spec = fft_length // 2 + 1
    center = fft_length // 2
    rows, cols, vals = [], [], []
    for k, (f, length) in enumerate(zip(freqs, lengths)):
        n = int(math.ceil(length))
        if n % 2 == 0:
            n += 1
        t = np.arange(n) - n // 2
        window = 0.5 + 0.5 * np.cos(2 * np.pi * t / length)
        window[np.abs(t) > length / 2] = 0.0
        atom = window * np.exp(2j * np.pi * f * t / sample_rate)
        atom /= np.linalg.norm(atom)
        temporal = np.zeros(fft_length, dtype=complex)
        temporal[center - n // 2: center + n // 2 + 1] = atom
        spectrum = np.fft.fft(temporal)[:n_spec]
        mag = np.abs(spectrum)
        keep = np.flatnonzero(mag >= KERNEL_THRESHOLD * mag.max())
        rows.append(keep)
        cols.append(np.full(len(keep), k))
        vals.append(np.conj(spectrum[keep]) / fft_length)
    matrix = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_spec, config.n_bins),
    )
    return CqtKernel(config, sample_rate, fft_length, matrix)


def cqt_magnitudes(chunk: AudioChunk, config: CqtConfig | None = None) -> np.ndarray:
    """Constant-Q magnitude spectrogram, shape ``(n_bins, N)``.

    Frames are centred on multiples of ``hop_length`` (the signal is zero
    padded at both ends), so ``N == len(samples) // hop_length + 1``.
    """
    config = config or CqtConfig()
    kernel = cqt_kernel(config, chunk.sample_rate)
    x = np.asarray(chunk.samples, dtype=np.float64)
    hop, L = config.hop_length, kernel.fft_length
    n_frames = len(x) // hop + 1
    padded = np.zeros((n_frames - 1) * hop + L)
    start = L // 2
    padded[start:start + len(x)] = x[: len(padded) - start]
    frames = sliding_window_view(padded, L)[::hop][:n_frames]
    out = np.empty((config.n_bins, n_frames))
    for i in range(0, n_frames, _FRAME_BATCH):
        spec = np.fft.rfft(frames[i:i + _FRAME_BATCH], axis=1)
        out[:, i:i + _FRAME_BATCH] = np.abs((kernel.matrix.T @ spec.T))
    return out


def normalize_frames(matrix: np.ndarray) -> np.ndarray:
    """Scale each column so its maximum is 1; all-zero columns stay zero."""
    m = np.asarray(matrix, dtype=np.float64)
    peak = m.max(axis=0, keepdims=True)
    out = np.zeros_like(m)
    live = peak[0] > np.finfo(np.float64).tiny
    out[:, live] = m[:, live] / peak[:, live]
    return out


def fold_to_chroma(cqt: np.ndarray, config: CqtConfig | None = None, frame_rate: float = 0.0) -> Chromagram:
    """Sum CQT bins by pitch class, then max-normalize every frame."""
    config = config or CqtConfig()
    cqt = np.asarray(cqt, dtype=np.float64)
    if cqt.ndim != 2 or cqt.shape[0] != config.n_bins:
        raise StructuralError(f"expected {config.n_bins} CQT bins, got shape {cqt.shape}")
    folded = np.zeros((12, cqt.shape[1]))
    np.add.at(folded, config.pitch_classes(), cqt)
    return Chromagram(normalize_frames(folded), frame_rate)


def chromagram(chunk: AudioChunk, config: CqtConfig | None = None) -> Chromagram:
    config = config or CqtConfig()
    return fold_to_chroma(cqt_magnitudes(chunk, config), config, chunk.sample_rate / config.hop_length)


def write_chroma_csv(chromagrams: Iterable[Chromagram], fp: TextIO) -> None:
    """Write frames side by side as CSV: 12 rows labelled C..B."""
    blocks = [c.values for c in chromagrams]
    values = np.hstack(blocks) if blocks else np.zeros((12, 0))
    writer = csv.writer(fp)
    for name, row in zip(PITCH_CLASS_NAMES, values):
        writer.writerow([name, *(f"{v:.6f}" for v in row)])
