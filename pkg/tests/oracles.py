"""Independent reference computations used as test oracles.

Nothing here imports chromachord; each helper re-derives its answer the
slow, obvious way so that the fast paths in the package have something to be
checked against.
"""

import math
import struct

import numpy as np

NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]


def loop_mean(matrix):
    rows = []
    for row in matrix:
        total = 0.0
        for v in row:
            total += float(v)
        rows.append(total / len(row))
    return rows


def direct_confidence(emph, root, eps=1e-6):
    maj = float(emph[(root + 4) % 12])
    mnr = float(emph[(root + 3) % 12])
    c_raw = maj / (maj + mnr + eps)
    return c_raw, abs(2 * c_raw - 1) * 100


def reference_band(c_pct):
    if c_pct >= 95:
        return "VeryStrong"
    if c_pct >= 80:
        return "Strong"
    if c_pct >= 60:
        return "Moderate"
    if c_pct >= 40:
        return "Uncertain"
    if c_pct >= 20:
        return "Weak"
    return "VeryWeak"


def first_argmax(values):
    best = 0
    for i, v in enumerate(values):
        if v > values[best]:
            best = i
    return best


def dft_peak_frequency(x, sample_rate):
    spec = np.abs(np.fft.rfft(x))
    return np.argmax(spec) * sample_rate / len(x), sample_rate / len(x)


def dft_pitch_class_profile(x, sample_rate, f_lo=30.0, f_hi=5000.0):
    """Fold plain DFT magnitudes onto the nearest equal-tempered pitch class."""
    spec = np.abs(np.fft.rfft(x))
    freqs = np.fft.rfftfreq(len(x), 1.0 / sample_rate)
    profile = np.zeros(12)
    for f, m in zip(freqs, spec):
        if f_lo <= f <= f_hi:
            profile[int(round(69 + 12 * math.log2(f / 440.0))) % 12] += m
    return profile


def et_frequency(midi):
    return 440.0 * 2 ** ((midi - 69) / 12)


def wav_bytes(ints, sample_rate, channels=1, bits=16, tag=1, extra_chunks=b""):
    """Hand-assembled RIFF/WAVE file from already-quantized sample values."""
    if bits == 16:
        data = struct.pack(f"<{len(ints)}h", *ints)
    elif bits == 24:
        data = b"".join(struct.pack("<i", v)[:3] for v in ints)
    elif bits == 32 and tag == 3:
        data = struct.pack(f"<{len(ints)}f", *ints)
    else:
        data = bytes(len(ints) * bits // 8)
    block = channels * bits // 8
    fmt = struct.pack("<HHIIHH", tag, channels, sample_rate, sample_rate * block, block, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", 16) + fmt + extra_chunks
    body += b"data" + struct.pack("<I", len(data)) + data
    return b"RIFF" + struct.pack("<I", len(body)) + body


def xor_all(data):
    acc = 0
    for b in data:
        acc ^= b
    return acc
