"""Command-line entry points: ``chromachord`` and ``chromachord-synth``."""

from __future__ import annotations

import argparse
import logging
import os
import shutil
import sys

from .audio_io import StreamConfig, write_wav
from .chroma import PITCH_CLASS_NAMES, write_chroma_csv
from .colours import format_colour_table
from .engine import EngineConfig, Quality, Strength
from .errors import ChromachordError
from .pipeline import EXIT_INPUT_ERROR, EXIT_SINK_ERROR, KeyboardSink, NdjsonSink, SerialSink, run_pipeline
from .serial import DeviceTransport, MockSerialTransport
from .synth import TriadSpec, synth_triad

log = logging.getLogger("chromachord")

_FLATS = {"DB": "C#", "EB": "D#", "GB": "F#", "AB": "G#", "BB": "A#"}


class _Parser(argparse.ArgumentParser):
    # usage problems are input errors (exit 1); 2 is reserved for sink failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _strength(text):
    try:
        return Strength.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chromachord", description="Estimate major/minor triads from WAV audio, chunk by chunk.")
    p.add_argument("--input", metavar="PATH|-", help="WAV file to analyse, or - for standard input")
    p.add_argument("--sample-rate", type=int, default=22050, help="engine sample rate in Hz (default 22050)")
    p.add_argument("--chunk-seconds", type=float, default=4.0, help="analysis window length (default 4.0)")
    p.add_argument("--tau-tone", type=float, default=0.15)
    p.add_argument("--tau-chord", type=float, default=0.2)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--display-floor", type=_strength, default=Strength.MODERATE, metavar="BAND",
                   help="weakest strength shown by the renderer and serial output (default Moderate)")
    p.add_argument("--ndjson", metavar="PATH|-", help="write one JSON event per line (default: stdout when no other sink)")
    p.add_argument("--render", action="store_true", help="draw a coloured keyboard in the terminal")
    p.add_argument("--serial", metavar="PATH|mock", help="send LED frames to a device node, or to a loopback mock")
    p.add_argument("--dump-chroma", metavar="PATH", help="write analysed chromagram frames as CSV")
    p.add_argument("--list-colours", action="store_true", help="print the note colour table and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    if args.list_colours:
        print(format_colour_table())
        return 0
    if args.input is None:
        build_parser().error("--input is required")
    try:
        stream_config = StreamConfig(args.sample_rate, args.chunk_seconds, args.input)
        engine_config = EngineConfig(args.tau_tone, args.tau_chord, args.n_min, display_floor=args.display_floor)
    except ChromachordError as exc:
        print(f"chromachord: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    sinks = []
    mock = None
    try:
        ndjson_target = args.ndjson
        if ndjson_target is None and not (args.render or args.serial):
            ndjson_target = "-"
        if ndjson_target == "-":
            sinks.append(NdjsonSink(sys.stdout))
        elif ndjson_target:
            sinks.append(NdjsonSink(open(ndjson_target, "w", encoding="utf-8"), close_fp=True))
        if args.render:
            out = sys.stderr if ndjson_target == "-" else sys.stdout
            sinks.append(KeyboardSink(out, shutil.get_terminal_size().columns))
        if args.serial == "mock":
            mock = MockSerialTransport()
            sinks.append(SerialSink(mock))
        elif args.serial:
            sinks.append(SerialSink(DeviceTransport(args.serial)))
    except OSError as exc:
        print(f"chromachord: cannot open output: {exc}", file=sys.stderr)
        for sink in sinks:
            sink.close()
        return EXIT_SINK_ERROR

    chromagrams = []
    on_chroma = chromagrams.append if args.dump_chroma else None
    result = run_pipeline(stream_config, engine_config, sinks, on_chromagram=on_chroma)
    if result.error:
        print(f"chromachord: {result.error}", file=sys.stderr)
    if args.dump_chroma:
        try:
            with open(args.dump_chroma, "w", newline="", encoding="utf-8") as fp:
                write_chroma_csv(chromagrams, fp)
        except OSError as exc:
            print(f"chromachord: cannot write chroma dump: {exc}", file=sys.stderr)
            return result.exit_status or EXIT_SINK_ERROR
    if mock is not None:
        print(mock.summary(), file=sys.stderr)
    return result.exit_status


def parse_note(text: str) -> int:
    name = text.strip().upper()
    name = _FLATS.get(name, name)
    if name not in PITCH_CLASS_NAMES:
        raise argparse.ArgumentTypeError(f"unknown note {text!r}")
    return PITCH_CLASS_NAMES.index(name)


def synth_main(argv=None) -> int:
    p = _Parser(prog="chromachord-synth", description="Write a sine-tone triad as 16-bit PCM WAV.")
    p.add_argument("--root", type=parse_note, required=True, metavar="NOTE", help="root note, e.g. G or F#")
    p.add_argument("--quality", choices=("major", "minor"), default="major")
    p.add_argument("--seconds", type=float, default=4.0)
    p.add_argument("--octave", type=int, default=3)
    p.add_argument("--amplitude", type=float, default=0.3, help="linear gain per note")
    p.add_argument("--sample-rate", type=int, default=22050)
    p.add_argument("--out", required=True, metavar="PATH")
    args = p.parse_args(argv)
    quality = Quality.MAJOR if args.quality == "major" else Quality.MINOR
    try:
        spec = TriadSpec(args.root, quality, args.octave, args.amplitude, args.seconds, args.sample_rate)
        write_wav(args.out, synth_triad(spec), spec.sample_rate)
    except (ChromachordError, OSError) as exc:
        print(f"chromachord-synth: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return 0


def _exit(status: int):
    # a closed downstream pipe (e.g. `| head`) is already reported via the exit
    # status; keep the interpreter from printing a second traceback at shutdown
    try:
        sys.stdout.flush()
    except BrokenPipeError:
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    sys.exit(status)


def run():
    _exit(main())


def run_synth():
    _exit(synth_main())
