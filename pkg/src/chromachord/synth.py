"""Deterministic reference audio: equal-tempered sines and triads."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import DEFAULT_SAMPLE_RATE
from .engine import Quality
from .errors import ConfigError

A4_HZ = 440.0
A4_MIDI = 69
FADE_SECONDS = 0.010


def note_frequency(pitch_class: int, octave: int) -> float:
    """Equal-tempered frequency of a note, A4 = 440 Hz (C4 is middle C)."""
    midi = 12 * (octave + 1) + pitch_class
    return A4_HZ * 2.0 ** ((midi - A4_MIDI) / 12.0)


def triad_pitches(root: int, quality: Quality) -> tuple[int, int, int]:
    """Semitone offsets (from the root's C) of root, third and fifth.

    Values may exceed 11; they are absolute semitones above C of the root
    octave so that the voicing stays in root position.
    """
    third = 4 if quality is Quality.MAJOR else 3
    return root, root + third, root + 7


def _fade(n: int, sample_rate: int) -> np.ndarray:
    env = np.ones(n)
    k = min(int(round(FADE_SECONDS * sample_rate)), n // 2)
    if k > 0:
        ramp = np.arange(k) / k
        env[:k] = ramp
        env[n - k:] = ramp[::-1]
    return env


def synth_sine(frequency: float, duration: float, sample_rate: int = DEFAULT_SAMPLE_RATE,
               amplitude: float = 0.5, fade: bool = True) -> np.ndarray:
    n = int(duration * sample_rate + 0.5)
    t = np.arange(n) / sample_rate
    x = amplitude * np.sin(2 * np.pi * frequency * t)
    return x * _fade(n, sample_rate) if fade else x


@dataclass(frozen=True)
class TriadSpec:
    root: int
    quality: Quality = Quality.MAJOR
    octave: int = 3
    amplitude_per_note: float = 0.3
    duration: float = 4.0
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        if not 0 <= self.root <= 11:
            raise ConfigError(f"root pitch class out of range: {self.root}")
        if self.amplitude_per_note < 0 or 3 * self.amplitude_per_note > 1.0:
            raise ConfigError(
                f"amplitude_per_note={self.amplitude_per_note} would clip (3 notes must sum to <= 1.0)"
            )
        top = max(self.frequencies)
        if top >= self.sample_rate / 2:
            raise ConfigError(f"triad tone {top:.1f} Hz is above Nyquist for {self.sample_rate} Hz")

    @property
    def frequencies(self) -> tuple[float, float, float]:
        return tuple(
            note_frequency(s % 12, self.octave + s // 12)
            for s in triad_pitches(self.root, self.quality)
        )


def synth_triad(spec: TriadSpec) -> np.ndarray:
    """Sum of three equal-amplitude sines (root, third, fifth) with 10 ms fades."""
    n = int(spec.duration * spec.sample_rate + 0.5)
    t = np.arange(n) / spec.sample_rate
    x = np.zeros(n)
    for f in spec.frequencies:
        x += spec.amplitude_per_note * np.sin(2 * np.pi * f * t)
    return x * _fade(n, spec.sample_rate)
