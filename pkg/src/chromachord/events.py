"""Chord events and their NDJSON encoding."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace

from .chroma import PITCH_CLASS_NAMES
from .colours import chord_colours
from .engine import ChordEstimate, EngineConfig, Quality, Strength

INIT_MESSAGE = "Initializing chord analysis..."
WIRE_DECIMALS = 6

RGB = tuple[int, int, int]


class Outcome(enum.Enum):
    CHORD = "chord"
    NO_CHORD = "no-chord"
    INITIALIZING = "initializing"


@dataclass(frozen=True)
class ChordEvent:
    start_time: float
    end_time: float
    outcome: Outcome
    estimate: ChordEstimate | None = None
    colours: tuple[RGB, RGB, RGB] | None = None
    displayed: bool = False
    partial: bool = False

    @classmethod
    def initializing(cls, start_time, end_time, partial=False) -> "ChordEvent":
        return cls(start_time, end_time, Outcome.INITIALIZING, partial=partial)

    @classmethod
    def analyzed(cls, start_time, end_time, estimate, config: EngineConfig, partial=False) -> "ChordEvent":
        if estimate is None:
            return cls(start_time, end_time, Outcome.NO_CHORD, partial=partial)
        return cls(
            start_time,
            end_time,
            Outcome.CHORD,
            estimate=estimate,
            colours=tuple(c.rgb for c in chord_colours(estimate)),
            displayed=estimate.strength >= config.display_floor,
            partial=partial,
        )

    @property
    def notes(self) -> tuple[int, int, int] | tuple[()]:
        """Pitch classes of (root, third, fifth), or empty without a chord."""
        return self.estimate.pitch_classes if self.estimate else ()

    def quantized(self) -> "ChordEvent":
        """This event rounded to the precision carried on the wire."""
        est = self.estimate
        if est is not None:
            c_pct = round(est.c_pct, WIRE_DECIMALS)
            est = replace(est, c_pct=c_pct, c_raw=_c_raw_from(c_pct, est.quality), significant_tones=frozenset())
        return replace(
            self,
            start_time=round(self.start_time, WIRE_DECIMALS),
            end_time=round(self.end_time, WIRE_DECIMALS),
            estimate=est,
        )


def _c_raw_from(c_pct: float, quality: Quality) -> float:
    # the wire carries |2 c_raw - 1| only; the quality tells which side of 0.5
    half = c_pct / 200.0
    return 0.5 + half if quality is Quality.MAJOR else 0.5 - half


def _num(x: float) -> float:
    return round(float(x), WIRE_DECIMALS)


def event_record(event: ChordEvent) -> dict:
    """Wire representation as an insertion-ordered dict."""
    rec = {"start_time": _num(event.start_time), "end_time": _num(event.end_time), "outcome": event.outcome.value}
    est = event.estimate
    if event.outcome is Outcome.CHORD and est is not None:
        rec["root"] = PITCH_CLASS_NAMES[est.root]
        rec["quality"] = est.quality.value
        rec["fifth"] = PITCH_CLASS_NAMES[est.fifth]
        rec["c_pct"] = _num(est.c_pct)
        rec["strength"] = est.strength.key
        rec["colours"] = [list(rgb) for rgb in event.colours]
    rec["displayed"] = bool(event.displayed)
    rec["partial"] = bool(event.partial)
    return rec


def encode_ndjson(event: ChordEvent) -> str:
    """One NDJSON line (without the trailing newline)."""
    return json.dumps(event_record(event), separators=(",", ":"), ensure_ascii=False)


def decode_ndjson(line: str) -> ChordEvent:
    rec = json.loads(line)
    outcome = Outcome(rec["outcome"])
    estimate = colours = None
    if outcome is Outcome.CHORD:
        quality = Quality(rec["quality"])
        c_pct = float(rec["c_pct"])
        estimate = ChordEstimate(
            root=PITCH_CLASS_NAMES.index(rec["root"]),
            quality=quality,
            fifth=PITCH_CLASS_NAMES.index(rec["fifth"]),
            c_raw=_c_raw_from(c_pct, quality),
            c_pct=c_pct,
            strength=Strength.parse(rec["strength"]),
        )
        colours = tuple(tuple(int(v) for v in rgb) for rgb in rec["colours"])
    return ChordEvent(
        start_time=float(rec["start_time"]),
        end_time=float(rec["end_time"]),
        outcome=outcome,
        estimate=estimate,
        colours=colours,
        displayed=bool(rec["displayed"]),
        partial=bool(rec["partial"]),
    )
