"""Blank-run segmentation: offline two-stage and online single-pass paths.

A segment boundary is a run of at least v_threshold consecutive blank
labels on the subsampled grid. Detected segments are anchored at their
first/last non-blank step, expanded by the onset/offset margins in
feature frames, clipped to the stream, and merged when the expanded
spans share frames.

State machine for the online path:

    IDLE            --non-blank-->  IN_SPEECH       (emit Open)
    IN_SPEECH       --blank------>  COUNTING_BLANKS (blank_run = 1)
    COUNTING_BLANKS --non-blank-->  IN_SPEECH       (blank_run = 0)
    COUNTING_BLANKS --blank------>  COUNTING_BLANKS; when blank_run
                                    reaches v_threshold emit Close, go IDLE

Close therefore fires exactly v_threshold steps after the last non-blank.
The reported t_end includes the offset margin and may lie past the frames
seen so far; consumers buffer offset_margin * r feature frames, and
segments_from_events() clips once the stream length is known.
"""

from __future__ import annotations

import dataclasses
from enum import Enum, auto

import numpy as np

from .core import EventKind, LabelStream, PosteriorStream, Segment, SegmentEvent, SegmenterConfig
from .errors import InvalidConfig, InvalidState
from .greedy import ctc_collapse, greedy_decode


class Mode(Enum):
    """Online segmenter states."""

    IDLE = auto()
    IN_SPEECH = auto()
    COUNTING_BLANKS = auto()


def min_length_filter(output_len: int, encoded_len: int, alpha: float) -> bool:
    """Keep/reject decision for one segment; returns True to keep.

    Rejects when output_len / encoded_len <= alpha (boundary inclusive:
    a ratio exactly equal to alpha rejects).
    """
    if encoded_len < 1:
        raise ValueError(f"encoded_len must be >= 1, got {encoded_len}")
    return output_len / encoded_len > alpha


def _check_stream_extent(num_steps: int, r: int, total_feature_frames: int) -> None:
    if total_feature_frames < num_steps * r:
        raise ValueError(
            f"total_feature_frames {total_feature_frames} shorter than "
            f"{num_steps} steps * r={r}"
        )
    if total_feature_frames - num_steps * r >= r:
        raise ValueError(
            f"total_feature_frames {total_feature_frames} leaves a ragged tail of "
            f">= r={r} frames beyond {num_steps} steps"
        )


def _merge_shared_frames(segments: list[Segment],
                         transcript_lens: list[int] | None = None):
    """Merge neighbours whose expanded spans share at least one feature frame.

    Adjacent-but-disjoint spans stay separate: only actual frame sharing
    (duplicated audio downstream) triggers a merge. Transcript lengths, when
    given, add up exactly because merged parts are separated by blanks.
    """
    merged: list[Segment] = []
    lens: list[int] = []
    for i, seg in enumerate(segments):
        if merged and seg.t_start <= merged[-1].t_end:
            prev = merged[-1]
            merged[-1] = dataclasses.replace(
                prev,
                k_last_nonblank=seg.k_last_nonblank,
                t_end=max(prev.t_end, seg.t_end),
            )
            if transcript_lens is not None:
                lens[-1] += transcript_lens[i]
        else:
            merged.append(seg)
            if transcript_lens is not None:
                lens.append(transcript_lens[i])
    return (merged, lens) if transcript_lens is not None else (merged, None)


def _reindex(segments: list[Segment]) -> list[Segment]:
    return [dataclasses.replace(seg, index=i) for i, seg in enumerate(segments, start=1)]


def segment_offline(labels: LabelStream, cfg: SegmenterConfig, total_feature_frames: int,
                    frame_shift_ms: float = 10.0, merge: bool = True) -> list[Segment]:
    """Segment a complete label stream.

    Returns sorted, non-overlapping segments. Leading/trailing blank runs
    never create segments; interior blank runs of length >= cfg.v_threshold
    separate them. merge=False skips the shared-frame merge (diagnostic).
    """
    if labels.blank_id != cfg.blank_id:
        raise InvalidConfig(
            f"label stream blank_id {labels.blank_id} != config blank_id {cfg.blank_id}"
        )
    r = cfg.subsample_factor
    _check_stream_extent(labels.num_steps, r, total_feature_frames)

    nonblank = np.flatnonzero(labels.labels != cfg.blank_id) + 1  # 1-based steps
    if nonblank.size == 0:
        return []
    gaps = np.diff(nonblank) - 1
    cuts = np.flatnonzero(gaps >= cfg.v_threshold)
    firsts = np.concatenate(([nonblank[0]], nonblank[cuts + 1]))
    lasts = np.concatenate((nonblank[cuts], [nonblank[-1]]))

    segments = []
    for i, (ks, ke) in enumerate(zip(firsts, lasts), start=1):
        segments.append(Segment(
            index=i,
            k_first_nonblank=int(ks),
            k_last_nonblank=int(ke),
            t_start=max(1, r * (int(ks) - cfg.onset_margin)),
            t_end=min(total_feature_frames, r * (int(ke) + cfg.offset_margin)),
            frame_shift_ms=frame_shift_ms,
        ))
    if merge:
        segments, _ = _merge_shared_frames(segments)
    return _reindex(segments)


def encoded_length(segment: Segment, r: int) -> int:
    """Expanded feature span measured in subsampled steps (ceil division)."""
    return -(-segment.num_feature_frames // r)


def filter_short_segments(segments: list[Segment], labels: LabelStream,
                          cfg: SegmenterConfig) -> list[Segment]:
    """Drop segments whose collapsed transcript is too short for their span.

    output_len is the collapsed greedy transcript of the non-blank anchor
    span; encoded_len the expanded span in subsampled steps. Kept segments
    are reindexed 1..n.
    """
    kept = []
    for seg in segments:
        span = labels.labels[seg.k_first_nonblank - 1:seg.k_last_nonblank]
        out_len = len(ctc_collapse(span, cfg.blank_id))
        if min_length_filter(out_len, encoded_length(seg, cfg.subsample_factor),
                             cfg.min_len_ratio):
            kept.append(seg)
    return _reindex(kept)


class OnlineSegmenter:
    """Single-pass streaming segmenter; feed one label per subsampled step.

    step() returns the events fired by that label (possibly empty). Call
    finish(total_feature_frames) exactly once at end of stream to flush a
    segment still open; reset() rearms the instance for a new stream.
    """

    def __init__(self, cfg: SegmenterConfig, frame_shift_ms: float = 10.0):
        self.cfg = cfg
        self.frame_shift_ms = frame_shift_ms
        self.reset()

    def reset(self) -> None:
        self._mode = Mode.IDLE
        self._k = 0
        self._blank_run = 0
        self._index = 0
        self._k_first = 0
        self._k_last = 0
        self._t_start = 0
        self._out_len = 0
        self._prev_label: int | None = None
        self._finished = False

    # Introspection, mainly for tests and debugging.
    @property
    def mode(self) -> Mode:
        return self._mode

    @property
    def k_current(self) -> int:
        return self._k

    @property
    def blank_run(self) -> int:
        return self._blank_run

    @property
    def k_last_nonblank(self) -> int:
        return self._k_last

    @property
    def pending_segment(self) -> dict | None:
        """Partial segment while a segment is open, else None."""
        if self._mode is Mode.IDLE:
            return None
        return {
            "index": self._index,
            "k_first_nonblank": self._k_first,
            "k_last_nonblank": self._k_last,
            "t_start": self._t_start,
            "transcript_len": self._out_len,
        }

    def step(self, label: int) -> list[SegmentEvent]:
        if self._finished:
            raise InvalidState("step() after finish(); call reset() first")
        cfg = self.cfg
        self._k += 1
        k = self._k
        is_blank = label == cfg.blank_id
        events: list[SegmentEvent] = []

        if self._mode is Mode.IDLE:
            if is_blank:
                return events
            self._index += 1
            self._k_first = k
            self._t_start = max(1, cfg.subsample_factor * (k - cfg.onset_margin))
            self._out_len = 0
            self._prev_label = None
            self._mode = Mode.IN_SPEECH
            events.append(SegmentEvent(
                kind=EventKind.OPEN, emitted_at_step=k,
                index=self._index, t_start=self._t_start,
            ))

        if is_blank:
            if self._mode is Mode.IN_SPEECH:
                self._mode = Mode.COUNTING_BLANKS
                self._blank_run = 1
            else:
                self._blank_run += 1
            if self._blank_run >= cfg.v_threshold:
                events.append(SegmentEvent(
                    kind=EventKind.CLOSE, emitted_at_step=k,
                    index=self._index, t_start=self._t_start,
                    segment=self._pending(t_end=cfg.subsample_factor
                                          * (self._k_last + cfg.offset_margin)),
                    transcript_len=self._out_len,
                ))
                self._mode = Mode.IDLE
                self._blank_run = 0
                self._prev_label = None
                return events
        else:
            self._mode = Mode.IN_SPEECH
            self._blank_run = 0
            self._k_last = k
            if label != self._prev_label:
                self._out_len += 1
        self._prev_label = label
        return events

    def finish(self, total_feature_frames: int) -> list[SegmentEvent]:
        """Flush an open segment at end of stream; t_end is clipped to the stream."""
        if self._finished:
            raise InvalidState("finish() called twice; call reset() first")
        _check_stream_extent(self._k, self.cfg.subsample_factor, total_feature_frames)
        self._finished = True
        if self._mode is Mode.IDLE:
            return []
        t_end = min(total_feature_frames,
                    self.cfg.subsample_factor * (self._k_last + self.cfg.offset_margin))
        return [SegmentEvent(
            kind=EventKind.FLUSH, emitted_at_step=self._k,
            index=self._index, t_start=self._t_start,
            segment=self._pending(t_end=t_end),
            transcript_len=self._out_len,
        )]

    def _pending(self, t_end: int) -> Segment:
        return Segment(
            index=self._index,
            k_first_nonblank=self._k_first,
            k_last_nonblank=self._k_last,
            t_start=self._t_start,
            t_end=t_end,
            frame_shift_ms=self.frame_shift_ms,
        )


def segments_from_events(events: list[SegmentEvent], cfg: SegmenterConfig,
                         total_feature_frames: int,
                         apply_min_length: bool = False) -> list[Segment]:
    """Rebuild the final segment list from an online event stream.

    Clips close-event spans to the now-known stream length, merges shared
    frames, optionally applies the min-length filter from the transcript
    lengths carried on the events, and reindexes. The result equals
    segment_offline (plus filter_short_segments when enabled) on the same
    labels.
    """
    segments: list[Segment] = []
    lens: list[int] = []
    for ev in events:
        if ev.kind is EventKind.OPEN:
            continue
        seg = dataclasses.replace(ev.segment, t_end=min(ev.segment.t_end, total_feature_frames))
        segments.append(seg)
        if ev.transcript_len is None:
            if apply_min_length:
                raise ValueError("events lack transcript_len; cannot apply the length filter")
            lens.append(0)
        else:
            lens.append(ev.transcript_len)
    segments, lens = _merge_shared_frames(segments, lens)
    if apply_min_length:
        segments = [
            seg for seg, n in zip(segments, lens)
            if min_length_filter(n, encoded_length(seg, cfg.subsample_factor),
                                 cfg.min_len_ratio)
        ]
    return _reindex(segments)


def segment_posteriors(stream: PosteriorStream, cfg: SegmenterConfig,
                       apply_min_length: bool = True) -> list[Segment]:
    """Full offline pipeline: greedy decode, segment, optionally length-filter."""
    if cfg.subsample_factor != stream.subsample_factor:
        raise InvalidConfig(
            f"config subsample_factor {cfg.subsample_factor} != "
            f"stream subsample_factor {stream.subsample_factor}"
        )
    if stream.num_steps == 0:
        return []
    labels = greedy_decode(stream)
    segments = segment_offline(labels, cfg, stream.total_feature_frames,
                               frame_shift_ms=stream.frame_shift_ms)
    if apply_min_length:
        segments = filter_short_segments(segments, labels, cfg)
    return segments
