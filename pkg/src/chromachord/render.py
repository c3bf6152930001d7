"""One-octave terminal keyboard with the current triad's keys coloured."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .chroma import PITCH_CLASS_NAMES
from .events import INIT_MESSAGE, ChordEvent, Outcome

TRUECOLOR = "truecolor"
ANSI8 = "ansi8"
PLAIN = "plain"

NO_CHORD_HEADER = "—"
RESET = "\x1b[0m"

BLACK_KEYS = frozenset({1, 3, 6, 8, 10})
NEUTRAL_WHITE = (220, 220, 220)
NEUTRAL_BLACK = (48, 48, 48)

_ANSI8_PALETTE = (
    (0, 0, 0), (255, 0, 0), (0, 255, 0), (255, 255, 0),
    (0, 0, 255), (255, 0, 255), (0, 255, 255), (255, 255, 255),
)


@dataclass(frozen=True)
class KeyCell:
    pitch_class: int
    name: str
    rgb: tuple[int, int, int]
    lit: bool

    @property
    def black(self) -> bool:
        return self.pitch_class in BLACK_KEYS


def detect_colour_mode(env=None) -> str:
    env = os.environ if env is None else env
    if "NO_COLOR" in env or env.get("TERM") == "dumb":
        return PLAIN
    if env.get("COLORTERM", "").lower() in ("truecolor", "24bit"):
        return TRUECOLOR
    return ANSI8


def nearest_ansi8(rgb) -> int:
    """Index (0-7) of the closest basic terminal colour."""
    return min(range(8), key=lambda i: sum((a - b) ** 2 for a, b in zip(rgb, _ANSI8_PALETTE[i])))


def _bg(rgb, mode) -> str:
    if mode == TRUECOLOR:
        return "\x1b[48;2;{};{};{}m".format(*rgb)
    return f"\x1b[{40 + nearest_ansi8(rgb)}m"


def _fg_for(rgb, mode) -> str:
    r, g, b = rgb
    dark_text = 0.299 * r + 0.587 * g + 0.114 * b > 140
    if mode == TRUECOLOR:
        return "\x1b[38;2;0;0;0m" if dark_text else "\x1b[38;2;255;255;255m"
    return "\x1b[30m" if dark_text else "\x1b[37m"


def keyboard_cells(event: ChordEvent) -> list[KeyCell]:
    """Key states for one octave, C..B; only displayed chords light keys."""
    lit = {}
    if event.outcome is Outcome.CHORD and event.displayed:
        lit = dict(zip(event.notes, event.colours))
    cells = []
    for pc, name in enumerate(PITCH_CLASS_NAMES):
        neutral = NEUTRAL_BLACK if pc in BLACK_KEYS else NEUTRAL_WHITE
        cells.append(KeyCell(pc, name, lit.get(pc, neutral), pc in lit))
    return cells


def header(event: ChordEvent) -> str:
    est = event.estimate
    if event.outcome is not Outcome.CHORD or est is None:
        return NO_CHORD_HEADER
    text = f"{est.name}  {est.c_pct:.1f}%  {est.strength.label}"
    if not event.displayed:
        return f"{NO_CHORD_HEADER}  ({text}, below display floor)"
    return text


def render_keyboard(event: ChordEvent, width: int = 72, mode: str | None = None) -> str:
    """Render an event as a header line plus a coloured key row.

    ``mode`` is one of ``truecolor``, ``ansi8`` or ``plain``; by default it
    is detected from the environment (``NO_COLOR`` forces plain text).
    """
    if event.outcome is Outcome.INITIALIZING:
        return INIT_MESSAGE
    cells = keyboard_cells(event)
    if width <= 0:
        names = " ".join(PITCH_CLASS_NAMES[pc] for pc in event.notes) if event.displayed else "-"
        return f"{header(event)}: {names}"
    mode = detect_colour_mode() if mode is None else mode
    cell_width = max(1, width // 12)
    if mode == PLAIN:
        row = "".join(
            (f"[{c.name}]" if c.lit else c.name.lower()).center(cell_width)[:cell_width]
            for c in cells
        )
        return f"{header(event)}\n{row}"
    label_row, bar_row = [], []
    for c in cells:
        bg = _bg(c.rgb, mode)
        label_row.append(f"{bg}{_fg_for(c.rgb, mode)}{c.name.center(cell_width)[:cell_width]}{RESET}")
        bar_row.append(f"{bg}{' ' * cell_width}{RESET}")
    return "\n".join([header(event), "".join(label_row), "".join(bar_row)])
