"""Triad estimation from a chromagram.

A chunk's chromagram is averaged over time, squared to sharpen dominant
tones, gated on how many pitch classes are strong enough, and reduced to a
root-position major or minor triad. Confidence compares the energy of the
major and minor thirds above the root and is reported as a percentage with
a six-level strength rating.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .chroma import PITCH_CLASS_NAMES, Chromagram
from .errors import ConfigError, ContractError, NoRootError, StructuralError


class Quality(enum.Enum):
    MAJOR = "Major"
    MINOR = "Minor"

    @property
    def third_interval(self) -> int:
        return 4 if self is Quality.MAJOR else 3


class Strength(enum.IntEnum):
    """Confidence bands, ordered weakest to strongest."""

    VERY_WEAK = 0
    WEAK = 1
    UNCERTAIN = 2
    MODERATE = 3
    STRONG = 4
    VERY_STRONG = 5

    @property
    def key(self) -> str:
        """Machine name, e.g. ``VeryStrong``."""
        return "".join(part.capitalize() for part in self.name.split("_"))

    @property
    def label(self) -> str:
        """Display name, e.g. ``Very Strong``."""
        return " ".join(part.capitalize() for part in self.name.split("_"))

    @classmethod
    def parse(cls, text: str) -> "Strength":
        norm = text.replace(" ", "").replace("_", "").replace("-", "").lower()
        for band in cls:
            if band.key.lower() == norm:
                return band
        raise ValueError(f"unknown strength band {text!r}; expected one of {[b.key for b in cls]}")


# (lower bound, band), checked from the top
STRENGTH_BANDS = (
    (95.0, Strength.VERY_STRONG),
    (80.0, Strength.STRONG),
    (60.0, Strength.MODERATE),
    (40.0, Strength.UNCERTAIN),
    (20.0, Strength.WEAK),
    (0.0, Strength.VERY_WEAK),
)


@dataclass(frozen=True, eq=False)
class ChromaVector:
    """Twelve non-negative per-pitch-class values, C = 0.

    ``stage`` records where the vector came from (``"avg"`` for the time
    average, ``"emph"`` after squaring).
    """

    values: np.ndarray
    stage: str = "avg"

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.shape != (12,):
            raise StructuralError(f"chroma vector needs 12 values, got shape {v.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise StructuralError("chroma vector values must be finite and non-negative")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __getitem__(self, p):
        return self.values[p]

    def __len__(self):
        return 12

    def rotate(self, k: int) -> "ChromaVector":
        """Transpose up by ``k`` semitones: new[p] == old[p - k]."""
        return ChromaVector(np.roll(self.values, k), self.stage)


@dataclass(frozen=True)
class EngineConfig:
    tau_tone: float = 0.15
    tau_chord: float = 0.2
    n_min: int = 2
    epsilon: float = 1e-6
    display_floor: Strength = Strength.MODERATE

    def __post_init__(self):
        if not 0 < self.tau_tone <= self.tau_chord < 1:
            raise ConfigError(f"need 0 < tau_tone <= tau_chord < 1, got {self.tau_tone}, {self.tau_chord}")
        if self.n_min < 1:
            raise ConfigError("n_min must be at least 1")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")


@dataclass(frozen=True)
class ChordEstimate:
    root: int
    quality: Quality
    fifth: int
    c_raw: float
    c_pct: float
    strength: Strength
    significant_tones: frozenset = frozenset()

    @property
    def third(self) -> int:
        return (self.root + self.quality.third_interval) % 12

    @property
    def pitch_classes(self) -> tuple[int, int, int]:
        return self.root, self.third, self.fifth

    @property
    def root_name(self) -> str:
        return PITCH_CLASS_NAMES[self.root]

    @property
    def name(self) -> str:
        return f"{self.root_name} {self.quality.value}"


def _as_vector(v) -> np.ndarray:
    return v.values if isinstance(v, ChromaVector) else ChromaVector(v).values


def average_chroma(chromagram: Chromagram) -> ChromaVector:
    values = chromagram.values if isinstance(chromagram, Chromagram) else np.asarray(chromagram)
    if values.ndim != 2 or values.shape[0] != 12 or values.shape[1] < 1:
        raise StructuralError("cannot average a chromagram with no frames")
    return ChromaVector(values.mean(axis=1), "avg")


def emphasize(avg: ChromaVector) -> ChromaVector:
    return ChromaVector(_as_vector(avg) ** 2, "emph")


def significant_tones(emph: ChromaVector, config: EngineConfig = EngineConfig()) -> frozenset:
    v = _as_vector(emph)
    return frozenset(int(p) for p in np.flatnonzero(v >= config.tau_tone))


def chord_gate(emph: ChromaVector, config: EngineConfig = EngineConfig()) -> tuple[bool, int]:
    """Return ``(passes, count)`` for the chord-tone gate."""
    count = int(np.count_nonzero(_as_vector(emph) >= config.tau_chord))
    return count >= config.n_min, count


def find_root(emph: ChromaVector) -> int:
    v = _as_vector(emph)
    if not np.any(v > 0):
        raise NoRootError("no root in an all-zero chroma vector")
    return int(np.argmax(v))  # first maximum wins ties


def classify_third(emph: ChromaVector, root: int) -> Quality:
    v = _as_vector(emph)
    t_min, t_maj = (root + 3) % 12, (root + 4) % 12
    return Quality.MAJOR if v[t_maj] > v[t_min] else Quality.MINOR


def fifth_of(root: int) -> int:
    if not 0 <= root <= 11:
        raise ContractError(f"pitch class out of range: {root}")
    return (root + 7) % 12


def confidence(emph: ChromaVector, root: int, config: EngineConfig = EngineConfig()) -> tuple[float, float]:
    """Return ``(c_raw, c_pct)`` from the energies of the two thirds."""
    v = _as_vector(emph)
    maj, mnr = v[(root + 4) % 12], v[(root + 3) % 12]
    c_raw = float(maj / (maj + mnr + config.epsilon))
    c_pct = min(100.0, max(0.0, abs(2.0 * c_raw - 1.0) * 100.0))
    return c_raw, c_pct


def strength_band(c_pct: float) -> Strength:
    if math.isnan(c_pct) or not 0.0 <= c_pct <= 100.0:
        raise ContractError(f"confidence percentage must be in [0, 100], got {c_pct}")
    for lower, band in STRENGTH_BANDS:
        if c_pct >= lower:
            return band
    raise AssertionError("unreachable")


def estimate_from_emphasis(emph: ChromaVector, config: EngineConfig = EngineConfig()) -> ChordEstimate | None:
    """Everything after squaring: gate, root, third, fifth, confidence."""
    passes, _ = chord_gate(emph, config)
    if not passes:
        return None
    root = find_root(emph)
    c_raw, c_pct = confidence(emph, root, config)
    return ChordEstimate(
        root=root,
        quality=classify_third(emph, root),
        fifth=fifth_of(root),
        c_raw=c_raw,
        c_pct=c_pct,
        strength=strength_band(c_pct),
        significant_tones=significant_tones(emph, config),
    )


def estimate_chord(chromagram: Chromagram, config: EngineConfig = EngineConfig()) -> ChordEstimate | None:
    """Estimate the chunk's triad, or ``None`` when the gate rejects it."""
    return estimate_from_emphasis(emphasize(average_chroma(chromagram)), config)
