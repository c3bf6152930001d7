"""Newton colour-wheel palette for the twelve pitch classes."""

from __future__ import annotations

from dataclasses import dataclass

from .chroma import PITCH_CLASS_NAMES
from .errors import ContractError


@dataclass(frozen=True)
class NoteColour:
    pitch_class: int
    name: str
    rgb: tuple[int, int, int]
    colour_name: str

    @property
    def hex(self) -> str:
        return "#{:02x}{:02x}{:02x}".format(*self.rgb)


# Accidentals sit between the neighbouring naturals' hues.
_PALETTE = (
    ("Red-violet", (199, 21, 133)),
    ("Violet", (195, 118, 225)),
    ("Red", (255, 0, 0)),
    ("Red-orange", (255, 69, 0)),
    ("Orange", (255, 140, 0)),
    ("Yellow-orange", (255, 165, 0)),
    ("Yellow", (255, 255, 0)),
    ("Yellow-green", (173, 255, 47)),
    ("Green", (0, 255, 0)),
    ("Blue-green", (83, 183, 183)),
    ("Blue", (0, 0, 255)),
    ("Indigo", (75, 0, 130)),
)

NOTE_COLOURS = tuple(
    NoteColour(pc, PITCH_CLASS_NAMES[pc], rgb, cname) for pc, (cname, rgb) in enumerate(_PALETTE)
)


def colour_of(pitch_class: int) -> NoteColour:
    if not isinstance(pitch_class, int) or not 0 <= pitch_class <= 11:
        raise ContractError(f"pitch class must be an integer in [0, 11], got {pitch_class!r}")
    return NOTE_COLOURS[pitch_class]


def chord_colours(estimate) -> tuple[NoteColour, NoteColour, NoteColour]:
    """Colours of (root, third, fifth), in that order."""
    return tuple(colour_of(pc) for pc in estimate.pitch_classes)


def format_colour_table() -> str:
    lines = [f"{'note':<5}{'pc':>3}  {'rgb':<16}colour"]
    for c in NOTE_COLOURS:
        rgb = "({}, {}, {})".format(*c.rgb)
        lines.append(f"{c.name:<5}{c.pitch_class:>3}  {rgb:<16}{c.colour_name}")
    return "\n".join(lines)
