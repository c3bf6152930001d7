"""End-to-end stream processing: chunks in, chord events out to sinks."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import BinaryIO, Callable, Iterable, Iterator, Protocol, TextIO

from .audio_io import AudioChunk, StreamConfig, iter_chunks, iter_mono_blocks, open_source
from .chroma import Chromagram, CqtConfig, chromagram, cqt_kernel
from .engine import EngineConfig, estimate_chord
from .errors import ChromachordError
from .events import ChordEvent, encode_ndjson
from .render import render_keyboard
from .serial import encode_serial

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_SINK_ERROR = 2


class Sink(Protocol):
    def write(self, event: ChordEvent) -> None: ...

    def close(self) -> None: ...


class NdjsonSink:
    def __init__(self, fp: TextIO, close_fp: bool = False):
        self.fp = fp
        self._close_fp = close_fp

    def write(self, event):
        self.fp.write(encode_ndjson(event) + "\n")
        self.fp.flush()

    def close(self):
        self.fp.flush()
        if self._close_fp:
            self.fp.close()


class KeyboardSink:
    def __init__(self, fp: TextIO, width: int = 72, mode: str | None = None):
        self.fp = fp
        self.width = width
        self.mode = mode

    def write(self, event):
        self.fp.write(render_keyboard(event, self.width, self.mode) + "\n\n")
        self.fp.flush()

    def close(self):
        self.fp.flush()


class SerialSink:
    """Sends one frame per event to a byte transport (device or mock)."""

    def __init__(self, transport):
        self.transport = transport

    def write(self, event):
        self.transport.write(encode_serial(event))

    def close(self):
        self.transport.flush()
        self.transport.close()


class ChordAnalyzer:
    """Chunk -> chromagram -> chord event, with kernels built up front."""

    def __init__(self, engine_config: EngineConfig = EngineConfig(), cqt_config: CqtConfig = CqtConfig(),
                 sample_rate: int | None = None):
        self.engine_config = engine_config
        self.cqt_config = cqt_config
        if sample_rate is not None:
            cqt_kernel(cqt_config, sample_rate)

    def chromagram(self, chunk: AudioChunk) -> Chromagram:
        return chromagram(chunk, self.cqt_config)

    def analyze(self, chunk: AudioChunk) -> tuple[ChordEvent, Chromagram]:
        chroma = self.chromagram(chunk)
        estimate = estimate_chord(chroma, self.engine_config)
        start, end = _span(chunk)
        event = ChordEvent.analyzed(start, end, estimate, self.engine_config, partial=chunk.partial)
        return event, chroma


def _span(chunk: AudioChunk) -> tuple[float, float]:
    return chunk.start_time, chunk.start_time + chunk.n_valid / chunk.sample_rate


def iter_events(chunks: Iterable[AudioChunk], analyzer: ChordAnalyzer,
                on_chromagram: Callable[[Chromagram], None] | None = None) -> Iterator[ChordEvent]:
    """First chunk is the warm-up window; every later chunk is analysed."""
    for index, chunk in enumerate(chunks):
        if index == 0:
            yield ChordEvent.initializing(*_span(chunk), partial=chunk.partial)
            continue
        event, chroma = analyzer.analyze(chunk)
        if on_chromagram is not None:
            on_chromagram(chroma)
        yield event


@dataclass
class PipelineResult:
    events: list[ChordEvent] = field(default_factory=list)
    exit_status: int = EXIT_OK
    error: str | None = None
    chunk_times: list[float] = field(default_factory=list)  # decode + analysis + emission, per chunk
    wall_time: float = 0.0


def run_pipeline(stream_config: StreamConfig, engine_config: EngineConfig, sinks: list,
                 cqt_config: CqtConfig = CqtConfig(), source: BinaryIO | None = None,
                 on_chromagram: Callable[[Chromagram], None] | None = None) -> PipelineResult:
    """Decode the input, analyse it chunk by chunk and fan events out to sinks.

    ``source`` overrides ``stream_config.input_source`` with an open binary
    stream. Decode problems end the run with exit status 1, a failing sink
    with status 2; events emitted before the failure stay delivered.
    """
    if not sinks:
        raise ChromachordError("run_pipeline needs at least one sink")
    result = PipelineResult()
    t_start = time.perf_counter()
    fp = None
    owns_fp = source is None and stream_config.input_source not in (None, "-")
    try:
        analyzer = ChordAnalyzer(engine_config, cqt_config, stream_config.sample_rate)
        fp = source if source is not None else open_source(stream_config.input_source)
        blocks = iter_mono_blocks(fp, stream_config.sample_rate, stream_config.chunk_seconds)
        chunks = iter_chunks(blocks, stream_config)
        events = iter_events(chunks, analyzer, on_chromagram)
        while True:
            t0 = time.perf_counter()
            try:
                event = next(events)
            except StopIteration:
                break
            except (ChromachordError, OSError) as exc:
                result.exit_status, result.error = EXIT_INPUT_ERROR, f"input error: {exc}"
                break
            try:
                for sink in sinks:
                    sink.write(event)
            except Exception as exc:  # any sink failure ends the run
                result.exit_status, result.error = EXIT_SINK_ERROR, f"sink error: {exc}"
                result.events.append(event)
                break
            result.events.append(event)
            result.chunk_times.append(time.perf_counter() - t0)
    except (ChromachordError, OSError) as exc:
        result.exit_status, result.error = EXIT_INPUT_ERROR, f"input error: {exc}"
    finally:
        if fp is not None and owns_fp:
            fp.close()
        for sink in sinks:
            try:
                sink.close()
            except Exception as exc:
                if result.exit_status == EXIT_OK:
                    result.exit_status, result.error = EXIT_SINK_ERROR, f"sink error: {exc}"
                else:
                    log.debug("closing sink failed: %s", exc)
    result.wall_time = time.perf_counter() - t_start
    if result.error:
        log.debug(result.error)
    return result
