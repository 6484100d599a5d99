"""Command-line entry points: segment, simulate, eval, bench.

Data goes to stdout, diagnostics to stderr; CTC_SEG_LOG sets the log
level. Exit codes: 0 success, 1 input/format errors, 2 bad flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import statistics
import sys
from pathlib import Path

from .core import ReferenceAnnotation, SegmenterConfig
from .errors import CtcSegError
from .evaluate import evaluate, measure_rtf
from .energy_vad import energy_vad
from .greedy import greedy_label
from .io import (PosteriorReader, read_annotation, read_posterior_file,
                 read_wav_mono, write_posteriors, write_segments)
from .segmenter import OnlineSegmenter, segment_posteriors
from .simulate import synthesize_posteriors

logger = logging.getLogger("ctcseg")

# Named presets: v_threshold / onset / offset tuned per encoder setup.
PROFILES = {
    "csj": {"v_threshold": 16, "onset_margin": 2, "offset_margin": 3},
    "ted-bi": {"v_threshold": 16, "onset_margin": 4, "offset_margin": 10},
    "ted-uni": {"v_threshold": 16, "onset_margin": 10, "offset_margin": 2},
}
DEFAULT_PROFILE = "csj"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctcseg",
        description="Blank-run speech segmentation on CTC label posteriors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="segment a CTCP posterior stream")
    seg.add_argument("--input", type=Path, help="CTCP file (omit with --stream)")
    seg.add_argument("--stream", action="store_true", help="read CTCP bytes from stdin")
    seg.add_argument("--output", type=Path, help="write here instead of stdout")
    seg.add_argument("-V", "--threshold", dest="v_threshold", type=int,
                     help="minimum blank run (subsampled steps) ending a segment")
    seg.add_argument("--onset-margin", dest="onset_margin", type=int,
                     help="steps prepended to each segment")
    seg.add_argument("--offset-margin", dest="offset_margin", type=int,
                     help="steps appended to each segment")
    seg.add_argument("--blank-id", type=int, help="override the header blank label ID")
    seg.add_argument("--min-len-ratio", type=float, default=0.1,
                     help="reject segments with transcript/steps ratio <= this (default 0.1)")
    seg.add_argument("--mode", choices=["offline", "online"], default="offline")
    seg.add_argument("--format", choices=["jsonl", "ctm", "tsv"], default="jsonl")
    seg.add_argument("--profile", choices=sorted(PROFILES),
                     help="named threshold/margin preset (default csj)")
    seg.set_defaults(func=cmd_segment)

    sim = sub.add_parser("simulate", help="synthesize a CTCP file from an annotation")
    sim.add_argument("--annotation", type=Path, required=True,
                     help='JSON {"duration_sec": ..., "regions": [[s, e], ...]}')
    sim.add_argument("--output", type=Path, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--jitter", type=int, default=0, help="spike timing jitter in steps")
    sim.add_argument("--spike-gap-max", type=int, default=4,
                     help="max blank gap between spikes inside speech")
    sim.add_argument("--num-labels", type=int, default=32, help="CTC alphabet size incl. blank")
    sim.add_argument("-V", "--threshold", dest="v_threshold", type=int, default=16)
    sim.add_argument("-r", "--subsample", dest="subsample_factor", type=int, default=4)
    sim.add_argument("--blank-id", type=int, default=0)
    sim.add_argument("--frame-shift", dest="frame_shift_ms", type=float, default=10.0)
    sim.set_defaults(func=cmd_simulate)

    ev = sub.add_parser("eval", help="score segmentation against a reference annotation")
    ev.add_argument("--input", type=Path, required=True, help="CTCP file")
    ev.add_argument("--ref", type=Path, required=True, help="reference annotation JSON")
    ev.add_argument("-V", "--threshold", dest="v_threshold", type=int)
    ev.add_argument("--onset-margin", dest="onset_margin", type=int)
    ev.add_argument("--offset-margin", dest="offset_margin", type=int)
    ev.add_argument("--blank-id", type=int)
    ev.add_argument("--min-len-ratio", type=float, default=0.1)
    ev.add_argument("--profile", choices=sorted(PROFILES))
    ev.add_argument("--compare", action="store_true",
                    help="also run the energy VAD baseline on --wav")
    ev.add_argument("--wav", type=Path, help="paired 16-bit mono WAV for --compare")
    ev.add_argument("--energy-threshold", type=float, default=0.001,
                    help="mean-square energy threshold on the [-1, 1] scale")
    ev.add_argument("--hangover", type=int, default=2,
                    help="frames the energy VAD keeps speech after the last loud frame")
    ev.set_defaults(func=cmd_eval)

    bench = sub.add_parser("bench", help="measure segmentation real-time factor")
    bench.add_argument("--input", type=Path, help="CTCP file (omit for a synthetic stream)")
    bench.add_argument("--duration", type=float, default=60.0,
                       help="synthetic stream length in seconds")
    bench.add_argument("--num-labels", type=int, default=3000)
    bench.add_argument("-r", "--subsample", dest="subsample_factor", type=int, default=4)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--rtf", choices=["core", "e2e"], default="core",
                       help="core: in-memory pipeline only; e2e: includes file reading")
    bench.add_argument("--repeat", type=int, default=5)
    bench.add_argument("--profile", choices=sorted(PROFILES))
    bench.set_defaults(func=cmd_bench)

    return parser


def _resolve_cfg(args, blank_id: int, subsample_factor: int) -> SegmenterConfig:
    preset = PROFILES[args.profile or DEFAULT_PROFILE]

    def pick(value, key):
        return value if value is not None else preset[key]

    return SegmenterConfig(
        v_threshold=pick(getattr(args, "v_threshold", None), "v_threshold"),
        onset_margin=pick(getattr(args, "onset_margin", None), "onset_margin"),
        offset_margin=pick(getattr(args, "offset_margin", None), "offset_margin"),
        subsample_factor=subsample_factor,
        blank_id=blank_id,
        min_len_ratio=getattr(args, "min_len_ratio", 0.1),
    )


def _open_sink(args):
    if args.output is None:
        return sys.stdout, False
    return open(args.output, "w", encoding="utf-8", newline="\n"), True


def cmd_segment(args) -> int:
    if args.input is None and not args.stream:
        print("error: give --input PATH or --stream", file=sys.stderr)
        return 2
    if args.mode == "online":
        return _segment_online(args)

    stream = _read_input_stream(args)
    if args.blank_id is not None:
        stream = dataclasses.replace(stream, blank_id=args.blank_id)
    cfg = _resolve_cfg(args, stream.blank_id, stream.subsample_factor)
    segments = segment_posteriors(stream, cfg)
    logger.info("segmented %d steps into %d segments", stream.num_steps, len(segments))
    sink, owned = _open_sink(args)
    try:
        write_segments(segments, args.format, sink)
    finally:
        if owned:
            sink.close()
    return 0


def _read_input_stream(args):
    if args.input is not None:
        return read_posterior_file(args.input)
    return PosteriorReader(sys.stdin.buffer).to_stream()


def _segment_online(args) -> int:
    if args.input is not None:
        source = open(args.input, "rb")
        close_source = True
    else:
        source = sys.stdin.buffer
        close_source = False
    sink, owned = _open_sink(args)
    try:
        reader = PosteriorReader(source)
        blank_id = args.blank_id if args.blank_id is not None else reader.blank_id
        cfg = _resolve_cfg(args, blank_id, reader.subsample_factor)
        segmenter = OnlineSegmenter(cfg, frame_shift_ms=reader.frame_shift_ms)
        for row in reader:
            for event in segmenter.step(greedy_label(row)):
                print(_format_event(event, reader.frame_shift_ms), file=sink, flush=True)
        total = reader.num_frames * reader.subsample_factor
        for event in segmenter.finish(total):
            print(_format_event(event, reader.frame_shift_ms), file=sink, flush=True)
    finally:
        if close_source:
            source.close()
        if owned:
            sink.close()
    return 0


def _format_event(event, frame_shift_ms: float) -> str:
    start_sec = event.t_start * frame_shift_ms / 1000.0
    if event.segment is None:
        return (
            f'{{"event": "{event.kind.value}", "step": {event.emitted_at_step}, '
            f'"index": {event.index}, "k_first": {event.emitted_at_step}, '
            f'"t_start": {event.t_start}, "start_sec": {start_sec:.6f}}}'
        )
    seg = event.segment
    return (
        f'{{"event": "{event.kind.value}", "step": {event.emitted_at_step}, '
        f'"index": {event.index}, "k_first": {seg.k_first_nonblank}, '
        f'"k_last": {seg.k_last_nonblank}, "t_start": {seg.t_start}, '
        f'"t_end": {seg.t_end}, "start_sec": {seg.start_sec:.6f}, '
        f'"end_sec": {seg.end_sec:.6f}, "transcript_len": {event.transcript_len}}}'
    )


def cmd_simulate(args) -> int:
    ref = read_annotation(args.annotation, label_alphabet_size=args.num_labels)
    cfg = SegmenterConfig(
        v_threshold=args.v_threshold, onset_margin=0, offset_margin=0,
        subsample_factor=args.subsample_factor, blank_id=args.blank_id,
        min_len_ratio=0.0,
    )
    stream = synthesize_posteriors(ref, cfg, jitter_steps=args.jitter,
                                   spike_gap_max=args.spike_gap_max, seed=args.seed,
                                   frame_shift_ms=args.frame_shift_ms)
    write_posteriors(stream, args.output)
    logger.info("wrote %d steps x %d labels to %s", stream.num_steps,
                stream.num_labels, args.output)
    return 0


def cmd_eval(args) -> int:
    stream = read_posterior_file(args.input)
    if args.blank_id is not None:
        stream = dataclasses.replace(stream, blank_id=args.blank_id)
    ref = read_annotation(args.ref)
    r = stream.subsample_factor
    total = stream.total_feature_frames
    ann_frames = int(round(ref.total_duration_sec * 1000.0 / stream.frame_shift_ms))
    if abs(ann_frames - total) > r:
        print(
            f"error: annotation covers {ann_frames} frames but the stream has {total} "
            f"(> 1 posterior frame apart)", file=sys.stderr,
        )
        return 1

    cfg = _resolve_cfg(args, stream.blank_id, r)
    hyp = segment_posteriors(stream, cfg)
    report = evaluate(hyp, ref, stream.frame_shift_ms, total)

    if not args.compare:
        print(json.dumps(report.as_dict(), sort_keys=True))
        return 0

    if args.wav is None:
        print("error: --compare requires --wav", file=sys.stderr)
        return 2
    samples, rate = read_wav_mono(args.wav)
    wav_frames = int(round(len(samples) / rate * 1000.0 / stream.frame_shift_ms))
    if abs(wav_frames - total) > r:
        print(
            f"error: WAV covers {wav_frames} frames but the stream has {total} "
            f"(> 1 posterior frame apart)", file=sys.stderr,
        )
        return 1
    energy_segments = [
        dataclasses.replace(s, t_end=min(s.t_end, total))
        for s in energy_vad(samples, rate, stream.frame_shift_ms,
                            args.energy_threshold, args.hangover)
        if s.t_start <= total
    ]
    energy_report = evaluate(energy_segments, ref, stream.frame_shift_ms, total)
    print(json.dumps(
        {"ctc_blank_run": report.as_dict(), "energy_vad": energy_report.as_dict()},
        sort_keys=True,
    ))
    return 0


def _synthetic_bench_stream(args):
    """Alternating 2 s speech / 1 s silence filler for --input-less bench runs."""
    duration = args.duration
    regions = []
    t = 0.5
    while t + 2.0 < duration:
        regions.append((t, t + 2.0))
        t += 3.0
    ref = ReferenceAnnotation(speech_regions=tuple(regions), total_duration_sec=duration,
                              label_alphabet_size=args.num_labels)
    cfg = SegmenterConfig(subsample_factor=args.subsample_factor, min_len_ratio=0.0)
    return synthesize_posteriors(ref, cfg, jitter_steps=1, spike_gap_max=8, seed=args.seed)


def cmd_bench(args) -> int:
    if args.repeat < 1:
        print("error: --repeat must be >= 1", file=sys.stderr)
        return 2
    if args.input is not None:
        stream = read_posterior_file(args.input)
    else:
        if args.duration <= 0:
            print("error: zero-length input", file=sys.stderr)
            return 1
        stream = _synthetic_bench_stream(args)
    if stream.num_steps == 0:
        print("error: zero-length input", file=sys.stderr)
        return 1

    cfg = _resolve_cfg(args, stream.blank_id, stream.subsample_factor)
    audio_sec = stream.duration_sec
    if args.rtf == "e2e":
        if args.input is None:
            print("error: --rtf e2e needs --input (it times file reading too)",
                  file=sys.stderr)
            return 2

        def work():
            segment_posteriors(read_posterior_file(args.input), cfg)
    else:
        def work():
            segment_posteriors(stream, cfg)

    runs = [measure_rtf(work, audio_sec) for _ in range(args.repeat)]
    median = statistics.median(runs)
    elapsed = median * audio_sec
    print(json.dumps({
        "mode": args.rtf,
        "repeats": args.repeat,
        "audio_sec": audio_sec,
        "num_frames": stream.num_steps,
        "rtf_median": median,
        "rtf_runs": runs,
        "frames_per_sec": stream.num_steps / elapsed if elapsed > 0 else 0.0,
    }, sort_keys=True))
    return 0


def _configure_logging() -> None:
    level = os.environ.get("CTC_SEG_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        force=True)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    _configure_logging()
    try:
        return args.func(args)
    except (CtcSegError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
