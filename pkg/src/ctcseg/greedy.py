"""Greedy frame-synchronous label prediction and CTC collapse."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import LabelStream, PosteriorStream
from .errors import EmptyStream


def greedy_decode(stream: PosteriorStream) -> LabelStream:
    """Per-step argmax over the score vectors.

    Works identically on probabilities and pre-softmax scores (argmax is
    invariant under any strictly monotone transform). Ties break to the
    lowest label ID.
    """
    if stream.num_steps == 0:
        raise EmptyStream("cannot decode a stream with zero frames")
    labels = np.argmax(stream.frames, axis=1)
    return LabelStream(labels=labels, blank_id=stream.blank_id)


def greedy_label(scores: np.ndarray) -> int:
    """Argmax of a single score vector; the incremental unit of greedy_decode."""
    return int(np.argmax(scores))


def ctc_collapse(labels: LabelStream | Sequence[int], blank_id: int | None = None) -> list[int]:
    """Merge consecutive duplicate labels, then drop blanks."""
    if isinstance(labels, LabelStream):
        ids = labels.labels
        blank = labels.blank_id
    else:
        ids = labels
        if blank_id is None:
            raise ValueError("blank_id is required when collapsing a plain sequence")
        blank = blank_id
    out: list[int] = []
    prev: int | None = None
    for lab in ids:
        lab = int(lab)
        if lab != prev and lab != blank:
            out.append(lab)
        prev = lab
    return out
