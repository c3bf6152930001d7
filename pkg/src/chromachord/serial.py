"""Byte framing for the LED controller link.

Frame layout::

    0xC0 | count | count x (pitch_class, R, G, B) | xor

``count`` is 0..3 and the last byte is the XOR of every byte before it, so
XOR over a whole valid frame is zero. A frame with ``count == 0`` switches
all LEDs off.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import reduce
from operator import xor
from typing import BinaryIO

from .errors import ChromachordError
from .events import ChordEvent, Outcome

log = logging.getLogger(__name__)

SYNC = 0xC0
MAX_NOTES = 3

Note = tuple[int, tuple[int, int, int]]


class FrameError(ChromachordError):
    pass


def checksum(data: bytes) -> int:
    return reduce(xor, data, 0)


def encode_frame(notes) -> bytes:
    notes = list(notes)
    if len(notes) > MAX_NOTES:
        raise FrameError(f"a frame carries at most {MAX_NOTES} notes, got {len(notes)}")
    body = bytearray((SYNC, len(notes)))
    for pc, (r, g, b) in notes:
        body += bytes((pc, r, g, b))
    body.append(checksum(body))
    return bytes(body)


def decode_frame(data: bytes) -> list[Note]:
    """Validate a single frame and return its (pitch_class, rgb) notes."""
    if len(data) < 3:
        raise FrameError(f"frame too short ({len(data)} bytes)")
    if data[0] != SYNC:
        raise FrameError(f"bad sync byte 0x{data[0]:02x}")
    count = data[1]
    if count > MAX_NOTES:
        raise FrameError(f"note count {count} exceeds {MAX_NOTES}")
    if len(data) != 3 + 4 * count:
        raise FrameError(f"frame length {len(data)} does not match count {count}")
    if checksum(data):
        raise FrameError("checksum mismatch")
    notes = []
    for i in range(count):
        pc, r, g, b = data[2 + 4 * i: 6 + 4 * i]
        if pc > 11:
            raise FrameError(f"pitch class {pc} out of range")
        notes.append((pc, (r, g, b)))
    return notes


BLANK_FRAME = encode_frame([])


def encode_serial(event: ChordEvent) -> bytes:
    """Frame for an event: its triad when displayed, otherwise all LEDs off."""
    if event.outcome is not Outcome.CHORD or not event.displayed:
        return BLANK_FRAME
    return encode_frame(zip(event.notes, event.colours))


@dataclass
class TransportError:
    index: int
    frame: bytes
    message: str


@dataclass
class MockSerialTransport:
    """Loopback stand-in for the microcontroller.

    Every ``write`` is taken as one frame. Frames are kept byte for byte in
    ``frames``; valid ones are decoded into ``log``; invalid ones are
    recorded in ``errors`` instead of raising.
    """

    frames: list[bytes] = field(default_factory=list)
    log: list[list[Note]] = field(default_factory=list)
    errors: list[TransportError] = field(default_factory=list)

    def write(self, data: bytes) -> int:
        data = bytes(data)
        self.frames.append(data)
        try:
            self.log.append(decode_frame(data))
        except FrameError as exc:
            self.errors.append(TransportError(len(self.frames) - 1, data, str(exc)))
        return len(data)

    def flush(self):
        pass

    def close(self):
        pass

    @property
    def lit(self) -> list[Note]:
        """Notes currently lit (from the last valid frame)."""
        return self.log[-1] if self.log else []

    def summary(self) -> str:
        return f"mock serial: {len(self.frames)} frames, {len(self.errors)} errors"


class DeviceTransport:
    """Raw byte sink for a serial device node or file.

    Line settings (baud rate etc.) are not touched; configure the port
    beforehand, e.g. ``stty -F /dev/ttyACM0 115200 raw``.
    """

    def __init__(self, path):
        self._fp: BinaryIO = open(path, "wb", buffering=0)

    def write(self, data: bytes) -> int:
        return self._fp.write(data)

    def flush(self):
        self._fp.flush()

    def close(self):
        self._fp.close()
