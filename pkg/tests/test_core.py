import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctcseg import (EventKind, InvalidConfig, LabelStream, PosteriorStream,
                    ReferenceAnnotation, Segment, SegmentEvent, SegmenterConfig,
                    clip_to_stream, subsampled_to_feature_index)


class TestIndexArithmetic:
    def test_first_step_maps_to_r(self):
        assert subsampled_to_feature_index(1, 4) == 4

    def test_threshold_step_at_subsampling_four(self):
        # 16 steps at r=4 end at feature frame 64, i.e. 640 ms at a 10 ms shift
        assert subsampled_to_feature_index(16, 4) == 64

    def test_plain_arithmetic(self):
        assert subsampled_to_feature_index(7, 2) == 14

    @given(st.integers(min_value=1, max_value=10**6))
    def test_identity_at_r_one(self, k):
        assert subsampled_to_feature_index(k, 1) == k

    @given(st.integers(min_value=1, max_value=10**5),
           st.integers(min_value=1, max_value=10**5),
           st.integers(min_value=1, max_value=16))
    def test_order_preserved(self, k1, k2, r):
        if k1 < k2:
            assert subsampled_to_feature_index(k1, r) < subsampled_to_feature_index(k2, r)


class TestClip:
    def test_lower(self):
        assert clip_to_stream(-3, 1, 100) == 1

    def test_upper(self):
        assert clip_to_stream(30, 1, 28) == 28

    def test_identity(self):
        assert clip_to_stream(15, 1, 100) == 15

    @given(st.integers(-1000, 1000), st.integers(1, 100), st.integers(100, 500))
    def test_idempotent_and_in_range(self, t, lo, hi):
        once = clip_to_stream(t, lo, hi)
        assert clip_to_stream(once, lo, hi) == once
        assert lo <= once <= hi

    def test_empty_range_rejected(self):
        with pytest.raises(ValueError):
            clip_to_stream(5, 10, 2)


class TestPosteriorStream:
    def test_ragged_rows_rejected(self):
        with pytest.raises(ValueError):
            PosteriorStream(frames=np.array([[0.5, 0.5], [1.0]], dtype=object))

    def test_probability_rows_must_sum_to_one(self):
        frames = np.array([[0.5, 0.5], [0.9, 0.3]], dtype=np.float32)
        with pytest.raises(ValueError, match="row 2"):
            PosteriorStream(frames=frames)

    def test_sum_tolerance_is_loose_enough(self):
        frames = np.array([[0.50004, 0.5]], dtype=np.float32)
        PosteriorStream(frames=frames)  # within 1e-4

    def test_probabilities_must_be_in_unit_interval(self):
        with pytest.raises(ValueError):
            PosteriorStream(frames=np.array([[1.2, -0.2]], dtype=np.float32))

    def test_presoftmax_skips_probability_checks(self):
        stream = PosteriorStream(frames=np.array([[5.0, -3.0]], dtype=np.float32),
                                 presoftmax=True)
        assert stream.num_labels == 2

    def test_subsample_factor_must_be_positive(self):
        with pytest.raises(InvalidConfig):
            PosteriorStream(frames=np.array([[1.0, 0.0]], dtype=np.float32),
                            subsample_factor=0)

    def test_blank_must_be_in_alphabet(self):
        with pytest.raises(InvalidConfig):
            PosteriorStream(frames=np.array([[1.0, 0.0]], dtype=np.float32), blank_id=2)

    def test_derived_sizes(self):
        stream = PosteriorStream(frames=np.zeros((5, 3), dtype=np.float32),
                                 subsample_factor=4, presoftmax=True)
        assert stream.num_steps == 5
        assert stream.num_labels == 3
        assert stream.total_feature_frames == 20
        assert stream.duration_sec == pytest.approx(0.2)


class TestLabelStream:
    def test_negative_labels_rejected(self):
        with pytest.raises(ValueError):
            LabelStream([0, -1], blank_id=0)

    def test_num_steps(self):
        assert LabelStream([0, 1, 2], blank_id=0).num_steps == 3


class TestSegmenterConfig:
    def test_defaults_are_the_tuned_values(self):
        cfg = SegmenterConfig()
        assert (cfg.v_threshold, cfg.onset_margin, cfg.offset_margin) == (16, 2, 3)
        assert cfg.min_len_ratio == 0.1

    @pytest.mark.parametrize("kwargs", [
        {"v_threshold": 0},
        {"onset_margin": -1},
        {"offset_margin": -1},
        {"subsample_factor": 0},
        {"blank_id": -1},
        {"min_len_ratio": 1.0},
        {"min_len_ratio": -0.1},
    ])
    def test_invalid_values(self, kwargs):
        with pytest.raises(InvalidConfig):
            SegmenterConfig(**kwargs)

    def test_blank_threshold_duration(self):
        cfg = SegmenterConfig(v_threshold=16, subsample_factor=4)
        assert cfg.blank_threshold_ms(10.0) == 640.0


class TestSegment:
    def test_second_fields_follow_frame_indices(self):
        seg = Segment(index=1, k_first_nonblank=3, k_last_nonblank=6,
                      t_start=4, t_end=16, frame_shift_ms=10.0)
        assert seg.start_sec == pytest.approx(0.04)
        assert seg.end_sec == pytest.approx(0.16)
        assert seg.num_feature_frames == 13

    @pytest.mark.parametrize("kwargs", [
        {"k_first_nonblank": 0, "k_last_nonblank": 1, "t_start": 1, "t_end": 2},
        {"k_first_nonblank": 5, "k_last_nonblank": 4, "t_start": 1, "t_end": 2},
        {"k_first_nonblank": 1, "k_last_nonblank": 1, "t_start": 0, "t_end": 2},
        {"k_first_nonblank": 1, "k_last_nonblank": 1, "t_start": 3, "t_end": 2},
    ])
    def test_bad_spans_rejected(self, kwargs):
        with pytest.raises(ValueError):
            Segment(index=1, **kwargs)


class TestSegmentEvent:
    def test_open_carries_no_segment(self):
        seg = Segment(index=1, k_first_nonblank=1, k_last_nonblank=1, t_start=1, t_end=2)
        with pytest.raises(ValueError):
            SegmentEvent(kind=EventKind.OPEN, emitted_at_step=1, index=1,
                         t_start=1, segment=seg)

    def test_close_requires_segment(self):
        with pytest.raises(ValueError):
            SegmentEvent(kind=EventKind.CLOSE, emitted_at_step=5, index=1, t_start=1)


class TestReferenceAnnotation:
    def test_regions_must_be_sorted_and_disjoint(self):
        with pytest.raises(ValueError):
            ReferenceAnnotation(speech_regions=((1.0, 2.0), (1.5, 3.0)),
                                total_duration_sec=5.0)

    def test_empty_region_rejected(self):
        with pytest.raises(ValueError):
            ReferenceAnnotation(speech_regions=((1.0, 1.0),), total_duration_sec=5.0)

    def test_region_past_end_rejected(self):
        with pytest.raises(ValueError):
            ReferenceAnnotation(speech_regions=((1.0, 6.0),), total_duration_sec=5.0)

    def test_frame_spans(self):
        ref = ReferenceAnnotation(speech_regions=((1.0, 2.0),), total_duration_sec=3.0)
        assert ref.region_frame_spans(10.0, 300) == [(101, 200)]

    def test_frame_spans_clip_to_stream(self):
        ref = ReferenceAnnotation(speech_regions=((0.0, 3.0),), total_duration_sec=3.0)
        assert ref.region_frame_spans(10.0, 280) == [(1, 280)]
