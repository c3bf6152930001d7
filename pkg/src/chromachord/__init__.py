"""Streaming major/minor triad estimation from CQT chroma features."""

from .audio_io import AudioChunk, StreamConfig, chunker, decode_wav, encode_wav, mixdown_mono, resample
from .chroma import Chromagram, CqtConfig, chromagram, cqt_magnitudes, fold_to_chroma
from .colours import NOTE_COLOURS, NoteColour, chord_colours, colour_of
from .engine import (
    ChordEstimate,
    ChromaVector,
    EngineConfig,
    Quality,
    Strength,
    average_chroma,
    chord_gate,
    classify_third,
    confidence,
    emphasize,
    estimate_chord,
    fifth_of,
    find_root,
    significant_tones,
    strength_band,
)
from .events import ChordEvent, Outcome, decode_ndjson, encode_ndjson
from .pipeline import run_pipeline
from .render import render_keyboard
from .serial import MockSerialTransport, encode_serial

__version__ = "0.1.0"
