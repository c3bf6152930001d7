"""WAV decoding, mono mixdown, resampling and fixed-duration chunking.

Everything here works on float64 numpy arrays scaled to [-1.0, 1.0]. The
reader and the resampler are incremental so a live WAV stream on standard
input can be analysed chunk by chunk without buffering the whole file.
"""

from __future__ import annotations

import io
import logging
import math
import struct
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, StructuralError, UnsupportedFormatError, WavDecodeError

log = logging.getLogger(__name__)

DEFAULT_SAMPLE_RATE = 22050
DEFAULT_CHUNK_SECONDS = 4.0

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

# (format tag, bits per sample) -> human readable codec name
SUPPORTED_CODECS = {
    (WAVE_FORMAT_PCM, 16): "pcm16",
    (WAVE_FORMAT_PCM, 24): "pcm24",
    (WAVE_FORMAT_IEEE_FLOAT, 32): "float32",
}

# data chunk sizes written by recorders that do not know the final length
_UNKNOWN_SIZES = (0, 0xFFFFFFFF, 0x7FFFFFFF)

RESAMPLE_TAPS = 64
_HALF_TAPS = RESAMPLE_TAPS // 2
_KAISER_BETA = 8.6
_ROLLOFF = 0.95


@dataclass(frozen=True)
class StreamConfig:
    sample_rate: int = DEFAULT_SAMPLE_RATE
    chunk_seconds: float = DEFAULT_CHUNK_SECONDS
    input_source: str = "-"

    def __post_init__(self):
        if not self.chunk_seconds > 0:
            raise ConfigError(f"chunk_seconds must be > 0, got {self.chunk_seconds}")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate < 8000:
            raise ConfigError(f"sample_rate must be an integer >= 8000, got {self.sample_rate}")
        if self.chunk_samples < 1:
            raise ConfigError("chunk is shorter than one sample")

    @property
    def chunk_samples(self) -> int:
        return int(self.chunk_seconds * self.sample_rate + 0.5)


@dataclass(frozen=True, eq=False)
class AudioChunk:
    """One analysis window of mono audio.

    ``samples`` always holds exactly one chunk's worth of audio. A short final
    chunk is zero padded, flagged ``partial`` and remembers how many samples
    were real in ``n_valid``.
    """

    samples: np.ndarray
    sample_rate: int
    start_time: float
    partial: bool = False
    n_valid: int = field(default=-1)

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise StructuralError("chunk samples must be one-dimensional")
        if not np.all(np.isfinite(samples)) or np.any(np.abs(samples) > 1.0):
            raise StructuralError("chunk samples must be finite and within [-1, 1]")
        if self.sample_rate <= 0:
            raise ConfigError("sample_rate must be positive")
        if self.start_time < 0:
            raise ConfigError("start_time must be non-negative")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        if self.n_valid < 0:
            object.__setattr__(self, "n_valid", len(samples))

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    @property
    def valid_samples(self) -> np.ndarray:
        return self.samples[: self.n_valid]


# -- WAV decoding -----------------------------------------------------------


@dataclass(frozen=True)
class WavFormat:
    format_tag: int
    channels: int
    sample_rate: int
    bits_per_sample: int
    block_align: int

    @property
    def codec(self) -> str:
        return SUPPORTED_CODECS[(self.format_tag, self.bits_per_sample)]


def _read_exact(fp: BinaryIO, n: int, field_name: str) -> bytes:
    buf = b""
    while len(buf) < n:
        part = fp.read(n - len(buf))
        if not part:
            raise WavDecodeError(field_name, f"unexpected end of stream ({len(buf)} of {n} bytes)")
        buf += part
    return buf


def _parse_fmt(body: bytes) -> WavFormat:
    if len(body) < 16:
        raise WavDecodeError("fmt_size", f"fmt chunk is {len(body)} bytes, need at least 16")
    tag, channels, rate, _byte_rate, block_align, bits = struct.unpack("<HHIIHH", body[:16])
    if tag == WAVE_FORMAT_EXTENSIBLE:
        if len(body) < 40:
            raise WavDecodeError("fmt_size", "WAVE_FORMAT_EXTENSIBLE needs a 40 byte fmt chunk")
        # the first two bytes of the sub-format GUID carry the real format tag
        tag = struct.unpack("<H", body[24:26])[0]
    if channels < 1:
        raise WavDecodeError("channels", "channel count must be at least 1")
    if rate < 1:
        raise WavDecodeError("sample_rate", "sample rate must be positive")
    if (tag, bits) not in SUPPORTED_CODECS:
        raise UnsupportedFormatError(
            f"unsupported WAV codec: format tag 0x{tag:04x} with {bits} bits per sample "
            "(supported: PCM 16-bit, PCM 24-bit, IEEE float 32-bit)"
        )
    if block_align != channels * bits // 8:
        raise WavDecodeError(
            "block_align", f"{block_align} does not match {channels} channels x {bits} bits"
        )
    return WavFormat(tag, channels, rate, bits, block_align)


def _convert(raw: bytes, fmt: WavFormat) -> np.ndarray:
    codec = fmt.codec
    if codec == "pcm16":
        return np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if codec == "pcm24":
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
        return ints.astype(np.float64) / 8388608.0
    out = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    if not np.all(np.isfinite(out)):
        raise WavDecodeError("data", "float samples contain NaN or infinity")
    return np.clip(out, -1.0, 1.0)


class WavReader:
    """Incremental RIFF/WAVE reader over a binary file object.

    The header is parsed on construction; sample data is then pulled with
    :meth:`read` or :meth:`blocks`. A data chunk whose declared size is 0 or
    0xFFFFFFFF (what streaming recorders write) is read until end of stream.
    """

    def __init__(self, fp: BinaryIO):
        self._fp = fp
        self.format = self._parse_header()
        self._leftover = b""

    def _parse_header(self) -> WavFormat:
        fp = self._fp
        head = fp.read(12)
        if len(head) < 12:
            raise WavDecodeError("riff_header", "stream is shorter than a RIFF header")
        if head[:4] != b"RIFF":
            raise WavDecodeError("riff_id", f"expected b'RIFF', got {head[:4]!r}")
        if head[8:12] != b"WAVE":
            raise WavDecodeError("wave_id", f"expected b'WAVE', got {head[8:12]!r}")
        fmt = None
        while True:
            hdr = fp.read(8)
            if len(hdr) < 8:
                raise WavDecodeError("data", "no data chunk before end of stream")
            chunk_id, size = hdr[:4], struct.unpack("<I", hdr[4:])[0]
            if chunk_id == b"fmt ":
                fmt = _parse_fmt(_read_exact(fp, size, "fmt"))
                if size % 2:
                    fp.read(1)
            elif chunk_id == b"data":
                if fmt is None:
                    raise WavDecodeError("fmt", "data chunk appears before fmt chunk")
                self._remaining = None if size in _UNKNOWN_SIZES else size
                return fmt
            else:
                _read_exact(fp, size + (size % 2), chunk_id.decode("latin-1", "replace"))

    def read(self, n_frames: int) -> np.ndarray:
        """Return up to ``n_frames`` frames as an ``(frames, channels)`` array."""
        fmt = self.format
        want = n_frames * fmt.block_align - len(self._leftover)
        if self._remaining is not None:
            want = min(want, self._remaining)
        raw = self._leftover
        while want > 0:
            part = self._fp.read(want)
            if not part:
                if self._remaining:
                    log.warning("WAV data ended %d bytes before its declared size", self._remaining)
                    self._remaining = 0
                break
            raw += part
            want -= len(part)
            if self._remaining is not None:
                self._remaining -= len(part)
        usable = len(raw) - len(raw) % fmt.block_align
        self._leftover = raw[usable:]
        return _convert(raw[:usable], fmt).reshape(-1, fmt.channels)

    def blocks(self, n_frames: int) -> Iterator[np.ndarray]:
        while True:
            block = self.read(n_frames)
            if not len(block):
                if self._leftover:
                    log.warning("dropping %d trailing bytes (incomplete frame)", len(self._leftover))
                return
            yield block


def decode_wav(data: bytes) -> tuple[int, int, np.ndarray]:
    """Decode a complete WAV byte string.

    Returns ``(sample_rate, channels, samples)`` with samples interleaved and
    scaled to [-1.0, 1.0].
    """
    reader = WavReader(io.BytesIO(data))
    frames = [b for b in reader.blocks(1 << 16)]
    fmt = reader.format
    if frames:
        samples = np.concatenate(frames).reshape(-1)
    else:
        samples = np.zeros(0)
    return fmt.sample_rate, fmt.channels, samples


def encode_wav(samples, sample_rate: int, channels: int = 1, codec: str = "pcm16") -> bytes:
    """Encode interleaved float samples as a WAV byte string."""
    x = np.clip(np.asarray(samples, dtype=np.float64).reshape(-1), -1.0, 1.0)
    if len(x) % channels:
        raise StructuralError("interleaved sample count is not a multiple of channels")
    if codec == "pcm16":
        tag, bits = WAVE_FORMAT_PCM, 16
        data = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2").tobytes()
    elif codec == "pcm24":
        tag, bits = WAVE_FORMAT_PCM, 24
        ints = np.clip(np.round(x * 8388608.0), -8388608, 8388607).astype("<i4")
        data = ints.view(np.uint8).reshape(-1, 4)[:, :3].tobytes()
    elif codec == "float32":
        tag, bits = WAVE_FORMAT_IEEE_FLOAT, 32
        data = x.astype("<f4").tobytes()
    else:
        raise UnsupportedFormatError(f"cannot encode codec {codec!r}")
    block_align = channels * bits // 8
    fmt = struct.pack("<HHIIHH", tag, channels, sample_rate, sample_rate * block_align, block_align, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(data)) + data
    if len(data) % 2:
        body += b"\x00"
    return b"RIFF" + struct.pack("<I", len(body)) + body


def write_wav(path, samples, sample_rate: int, codec: str = "pcm16") -> None:
    Path(path).write_bytes(encode_wav(samples, sample_rate, codec=codec))


# -- channel handling and resampling ------------------------------------------


def deinterleave(samples, channels: int) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64)
    if len(x) % channels:
        raise StructuralError("interleaved sample count is not a multiple of channels")
    return x.reshape(-1, channels).T


def mixdown_mono(channels: Sequence) -> np.ndarray:
    """Average channels frame by frame.

    ``channels`` is a sequence of equal-length 1-D arrays (or a 2-D array with
    one row per channel). A single channel is returned unchanged.
    """
    rows = [np.asarray(c, dtype=np.float64) for c in channels]
    if not rows:
        raise StructuralError("mixdown needs at least one channel")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise StructuralError(f"channels have unequal lengths: {sorted(lengths)}")
    if len(rows) == 1:
        return rows[0]
    return np.mean(np.vstack(rows), axis=0)


def _kernel_table(up: int, down: int) -> np.ndarray:
    # row p holds the 64 tap weights for output positions with fractional
    # input offset p / up; taps cover input offsets -31..+32 from floor(pos)
    cutoff = min(1.0, up / down) * _ROLLOFF if up < down else 1.0
    frac = np.arange(up)[:, None] / up
    d = frac - np.arange(-_HALF_TAPS + 1, _HALF_TAPS + 1)[None, :]
    window = np.i0(_KAISER_BETA * np.sqrt(np.clip(1.0 - (d / _HALF_TAPS) ** 2, 0.0, None)))
    h = cutoff * np.sinc(cutoff * d) * window
    return h / h.sum(axis=1, keepdims=True)


class Resampler:
    """Streaming band-limited resampler (64-tap Kaiser-windowed sinc).

    Feed blocks with :meth:`push`; call :meth:`finish` once at end of stream.
    Concatenated outputs are identical to :func:`resample` on the whole
    signal, and have ``round(n_in * to_rate / from_rate)`` samples in total.
    Signal edges are extended by repeating the first/last sample.
    """

    _BLOCK = 16384

    def __init__(self, from_rate: int, to_rate: int):
        if from_rate <= 0 or to_rate <= 0:
            raise ConfigError("sample rates must be positive")
        g = math.gcd(int(from_rate), int(to_rate))
        self.up = int(to_rate) // g
        self.down = int(from_rate) // g
        self.identity = self.up == self.down
        self._table = None if self.identity else _kernel_table(self.up, self.down)
        self._buf = np.zeros(0)
        self._base = 0
        self._count = 0
        self._next = 0

    def _compute(self, n0: int, n1: int) -> np.ndarray:
        offsets = np.arange(-_HALF_TAPS + 1, _HALF_TAPS + 1)
        out = []
        for start in range(n0, n1, self._BLOCK):
            n = np.arange(start, min(n1, start + self._BLOCK), dtype=np.int64)
            pos = n * self.down
            idx = (pos // self.up)[:, None] + offsets[None, :] - self._base
            taps = self._table[pos % self.up]
            out.append(np.einsum("ij,ij->i", self._buf[idx], taps))
        return np.concatenate(out) if out else np.zeros(0)

    def _trim(self):
        keep_from = self._next * self.down // self.up - _HALF_TAPS + 1
        drop = keep_from - self._base
        if drop > 0:
            self._buf = self._buf[drop:]
            self._base += drop

    def push(self, block) -> np.ndarray:
        x = np.asarray(block, dtype=np.float64)
        if self.identity:
            return x.copy()
        if not len(x):
            return np.zeros(0)
        if self._count == 0:
            x = np.concatenate([np.full(_HALF_TAPS - 1, x[0]), x])
            self._base = -(_HALF_TAPS - 1)
        self._buf = np.concatenate([self._buf, x])
        self._count += len(block)
        last_safe = self._count - 1 - _HALF_TAPS
        if last_safe < 0:
            return np.zeros(0)
        # largest n with floor(n * down / up) <= last_safe
        end = ((last_safe + 1) * self.up + self.down - 1) // self.down
        end = min(end, self._total(self._count))
        if end <= self._next:
            return np.zeros(0)
        out = self._compute(self._next, end)
        self._next = end
        self._trim()
        return out

    def _total(self, n_in: int) -> int:
        return (2 * n_in * self.up + self.down) // (2 * self.down)

    def finish(self) -> np.ndarray:
        if self.identity or self._count == 0:
            return np.zeros(0)
        self._buf = np.concatenate([self._buf, np.full(_HALF_TAPS + 1, self._buf[-1])])
        out = self._compute(self._next, self._total(self._count))
        self._next = self._total(self._count)
        return out


def resample(samples, from_rate: int, to_rate: int) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64)
    r = Resampler(from_rate, to_rate)
    if r.identity:
        return x.copy()
    return np.concatenate([r.push(x), r.finish()])


# -- chunking -------------------------------------------------------------------


class ChunkAssembler:
    """Cut a stream of mono blocks into consecutive non-overlapping chunks."""

    def __init__(self, config: StreamConfig):
        self.config = config
        self._pending: list[np.ndarray] = []
        self._n_pending = 0
        self._index = 0

    def _make(self, samples: np.ndarray, n_valid: int) -> AudioChunk:
        cfg = self.config
        chunk = AudioChunk(
            samples=np.clip(samples, -1.0, 1.0),
            sample_rate=cfg.sample_rate,
            start_time=self._index * cfg.chunk_seconds,
            partial=n_valid < cfg.chunk_samples,
            n_valid=n_valid,
        )
        self._index += 1
        return chunk

    def push(self, block) -> list[AudioChunk]:
        block = np.asarray(block, dtype=np.float64)
        if len(block):
            self._pending.append(block)
            self._n_pending += len(block)
        size = self.config.chunk_samples
        chunks = []
        if self._n_pending >= size:
            data = np.concatenate(self._pending)
            n_full = len(data) // size
            for k in range(n_full):
                chunks.append(self._make(data[k * size:(k + 1) * size], size))
            rest = data[n_full * size:]
            self._pending = [rest] if len(rest) else []
            self._n_pending = len(rest)
        return chunks

    def finish(self) -> list[AudioChunk]:
        if not self._n_pending:
            return []
        data = np.concatenate(self._pending)
        padded = np.zeros(self.config.chunk_samples)
        padded[: len(data)] = data
        self._pending, self._n_pending = [], 0
        return [self._make(padded, len(data))]


def chunker(stream, config: StreamConfig) -> list[AudioChunk]:
    assembler = ChunkAssembler(config)
    return assembler.push(stream) + assembler.finish()


def iter_chunks(blocks: Iterable, config: StreamConfig) -> Iterator[AudioChunk]:
    assembler = ChunkAssembler(config)
    for block in blocks:
        yield from assembler.push(block)
    yield from assembler.finish()


# -- sources ----------------------------------------------------------------------


def open_source(source) -> BinaryIO:
    if source in (None, "-"):
        return sys.stdin.buffer
    return open(source, "rb")


def iter_mono_blocks(fp: BinaryIO, target_rate: int, block_seconds: float = 1.0) -> Iterator[np.ndarray]:
    """Decode, mix down and resample a WAV stream, yielding mono blocks."""
    reader = WavReader(fp)
    fmt = reader.format
    resampler = Resampler(fmt.sample_rate, target_rate)
    n_frames = max(1, int(block_seconds * fmt.sample_rate))
    for frames in reader.blocks(n_frames):
        mono = mixdown_mono(frames.T)
        out = resampler.push(mono)
        if len(out):
            yield out
    tail = resampler.finish()
    if len(tail):
        yield tail
