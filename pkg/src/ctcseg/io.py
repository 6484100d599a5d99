"""File formats and streaming ingestion.

CTCP binary layout (all little-endian):

    offset  size  field
    0       4     magic "CTCP"
    4       2     u16 version (= 1)
    6       1     u8 flags, bit0: 1 = probabilities, 0 = pre-softmax scores
    7       1     u8 reserved (= 0)
    8       4     u32 num_frames (subsampled steps)
    12      4     u32 num_labels
    16      4     u32 blank_id
    20      4     f32 frame_shift_ms (RAW feature shift; a row spans
                  subsample_factor raw frames)
    24      4     u32 subsample_factor
    28      ...   num_frames rows of num_labels f32

The same layout is consumed incrementally from pipes/stdin, one row at a
time, so file and stream ingestion share a single reader.
"""

from __future__ import annotations

import json
import struct
import wave
from pathlib import Path
from typing import BinaryIO, Iterator, TextIO

import numpy as np

from .core import PosteriorStream, ReferenceAnnotation, Segment
from .errors import (BadMagic, FormatError, RowSumViolation, SinkError,
                     TruncatedFile, VersionMismatch)

MAGIC = b"CTCP"
VERSION = 1
_HEADER = struct.Struct("<4sHBBIIIfI")
HEADER_SIZE = _HEADER.size  # 28
_FLAG_PROBABILITIES = 0x01

_ROW_SUM_TOLERANCE = 1e-4


def _read_exact(fileobj: BinaryIO, n: int) -> bytes:
    """Read exactly n bytes, looping over short reads (pipes deliver chunks)."""
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = fileobj.read(remaining)
        if not chunk:
            break
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


class PosteriorReader:
    """Incremental CTCP reader over a binary file object.

    Parses and validates the header eagerly; rows() then yields one f32
    vector per declared frame, validating probability row sums as they
    arrive, so a consumer holds at most one frame vector at a time.
    """

    def __init__(self, fileobj: BinaryIO):
        raw = _read_exact(fileobj, HEADER_SIZE)
        if len(raw) < HEADER_SIZE:
            raise TruncatedFile(f"header truncated at offset {len(raw)} of {HEADER_SIZE}")
        magic, version, flags, _reserved, num_frames, num_labels, blank_id, \
            frame_shift_ms, subsample_factor = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise BadMagic(f"bad magic {magic!r} at offset 0, expected {MAGIC!r}")
        if version != VERSION:
            raise VersionMismatch(f"unsupported version {version}, expected {VERSION}")
        if num_labels < 1:
            raise FormatError("header declares zero labels")
        if blank_id >= num_labels:
            raise FormatError(f"header blank_id {blank_id} out of range for {num_labels} labels")
        if subsample_factor < 1:
            raise FormatError("header subsample_factor must be >= 1")
        if not frame_shift_ms > 0:
            raise FormatError(f"header frame_shift_ms must be positive, got {frame_shift_ms}")
        self._fileobj = fileobj
        self.num_frames = num_frames
        self.num_labels = num_labels
        self.blank_id = blank_id
        self.frame_shift_ms = frame_shift_ms
        self.subsample_factor = subsample_factor
        self.probabilities = bool(flags & _FLAG_PROBABILITIES)

    def rows(self) -> Iterator[np.ndarray]:
        row_bytes = self.num_labels * 4
        for row_idx in range(1, self.num_frames + 1):
            raw = _read_exact(self._fileobj, row_bytes)
            if len(raw) < row_bytes:
                offset = HEADER_SIZE + (row_idx - 1) * row_bytes + len(raw)
                raise TruncatedFile(
                    f"stream ended in row {row_idx} of {self.num_frames} at offset {offset}"
                )
            vec = np.frombuffer(raw, dtype="<f4")
            if self.probabilities:
                total = float(vec.sum(dtype=np.float32))
                if abs(total - 1.0) > _ROW_SUM_TOLERANCE:
                    raise RowSumViolation(f"row {row_idx} sums to {total:.6f}, not 1")
            yield vec

    def __iter__(self) -> Iterator[np.ndarray]:
        return self.rows()

    def to_stream(self) -> PosteriorStream:
        """Drain all rows into a PosteriorStream."""
        rows = list(self.rows())
        frames = np.stack(rows) if rows else np.empty((0, self.num_labels), dtype=np.float32)
        return PosteriorStream(
            frames=frames,
            frame_shift_ms=self.frame_shift_ms,
            subsample_factor=self.subsample_factor,
            blank_id=self.blank_id,
            presoftmax=not self.probabilities,
        )


def read_posterior_file(path: str | Path) -> PosteriorStream:
    """Read a whole CTCP file, validating header and rows."""
    with open(path, "rb") as f:
        return PosteriorReader(f).to_stream()


def write_posteriors(stream: PosteriorStream, sink: str | Path | BinaryIO) -> None:
    """Write a stream in CTCP layout; write-then-read round-trips bit-exactly."""
    flags = 0 if stream.presoftmax else _FLAG_PROBABILITIES
    header = _HEADER.pack(MAGIC, VERSION, flags, 0, stream.num_steps, stream.num_labels,
                          stream.blank_id, stream.frame_shift_ms, stream.subsample_factor)
    body = np.ascontiguousarray(stream.frames, dtype="<f4").tobytes()
    if hasattr(sink, "write"):
        sink.write(header)
        sink.write(body)
    else:
        with open(sink, "wb") as f:
            f.write(header)
            f.write(body)


def format_segment_jsonl(segment: Segment) -> str:
    return (
        f'{{"index": {segment.index}, "t_start": {segment.t_start}, '
        f'"t_end": {segment.t_end}, "start_sec": {segment.start_sec:.6f}, '
        f'"end_sec": {segment.end_sec:.6f}}}'
    )


def _segment_lines(segments: list[Segment], fmt: str) -> list[str]:
    if fmt == "jsonl":
        return [format_segment_jsonl(s) for s in segments]
    if fmt == "ctm":
        return [
            f"utt 1 {s.start_sec:.6f} {s.end_sec - s.start_sec:.6f} speech"
            for s in segments
        ]
    if fmt == "tsv":
        lines = ["index\tt_start\tt_end\tstart_sec\tend_sec"]
        lines += [
            f"{s.index}\t{s.t_start}\t{s.t_end}\t{s.start_sec:.6f}\t{s.end_sec:.6f}"
            for s in segments
        ]
        return lines
    raise ValueError(f"unknown segment format {fmt!r}")


def write_segments(segments: list[Segment], fmt: str, sink: str | Path | TextIO) -> None:
    """Write segments as jsonl, ctm-like, or tsv lines; byte-stable for fixed input."""
    text = "".join(line + "\n" for line in _segment_lines(segments, fmt))
    try:
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
    except OSError as exc:
        raise SinkError(f"failed writing segments: {exc}") from exc


def read_annotation(path: str | Path, label_alphabet_size: int = 32) -> ReferenceAnnotation:
    """Load {"duration_sec": float, "regions": [[start, end], ...]} JSON."""
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    try:
        duration = float(data["duration_sec"])
        regions = tuple((float(s), float(e)) for s, e in data["regions"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed annotation {path}: {exc}") from exc
    return ReferenceAnnotation(speech_regions=regions, total_duration_sec=duration,
                               label_alphabet_size=label_alphabet_size)


def read_wav_mono(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a 16-bit mono PCM RIFF file; returns (float32 samples in [-1, 1], rate)."""
    with wave.open(str(path), "rb") as w:
        if w.getnchannels() != 1:
            raise FormatError(f"{path}: expected mono, got {w.getnchannels()} channels")
        if w.getsampwidth() != 2:
            raise FormatError(f"{path}: expected 16-bit PCM, got {8 * w.getsampwidth()}-bit")
        rate = w.getframerate()
        raw = w.readframes(w.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32768.0
    return samples, rate
