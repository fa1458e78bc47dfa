import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imbfault.core import TimeSeriesFrame
from imbfault.errors import ConfigError, DataError
from imbfault.ingestion import LabeledSeries
from imbfault.rng import Pcg32
from imbfault.segmentation import segment, window_label, window_starts


def _series(n, labels=None, channels=2, seed=0):
    rng = Pcg32(seed)
    frame = TimeSeriesFrame(np.arange(n), tuple(f"c{i}" for i in range(channels)),
                            rng.normals(channels * n).reshape(channels, n))
    return LabeledSeries(frame, labels if labels is not None else ["N"] * n)


class TestSegment:
    def test_starts_for_len10_l4_n2(self):
        windows = segment(_series(10), 4, 2)
        assert [w.start_index for w in windows] == [0, 2, 4, 6]

    def test_case1_window_geometry(self):
        # L=106, N=20 on 2000 ticks
        windows = segment(_series(2000), 106, 20)
        assert len(windows) == (2000 - 106) // 20 + 1

    def test_case2_window_geometry(self):
        windows = segment(_series(200), 20, 5)
        assert len(windows) == (200 - 20) // 5 + 1

    @settings(max_examples=50, deadline=None)
    @given(st.integers(5, 60), st.integers(1, 20), st.integers(1, 10))
    def test_window_count_formula(self, n, length, stride):
        if length > n:
            length = n
        windows = segment(_series(n), length, stride)
        assert len(windows) == (n - length) // stride + 1

    def test_windows_are_exact_slices(self):
        series = _series(30, seed=3)
        for w in segment(series, 7, 3):
            assert np.array_equal(w.values, series.frame.values[:, w.start_index:w.start_index + 7])

    def test_window_too_long(self):
        with pytest.raises(DataError):
            segment(_series(5), 6, 1)
        with pytest.raises(DataError):
            segment(_series(5), 3, 0)

    def test_labels_assigned_per_rule(self):
        labels = ["N"] * 4 + ["F"] * 6
        windows = segment(_series(10, labels), 4, 2, rule="any_fault")
        assert [w.label for w in windows] == ["N", "F", "F", "F"]

    def test_window_starts_helper(self):
        assert window_starts(10, 4, 2).tolist() == [0, 2, 4, 6]


class TestWindowLabel:
    def test_majority_basic(self):
        assert window_label(["N", "N", "F", "F", "F"], "majority", "N") == "F"

    def test_any_fault_all_normal(self):
        assert window_label(["N", "N", "N", "N"], "any_fault", "N") == "N"

    def test_majority_tie_favors_fault(self):
        assert window_label(["N", "F"], "majority", "N") == "F"

    def test_majority_normal_wins_plurality(self):
        assert window_label(["N", "N", "N", "F1", "F2"], "majority", "N") == "N"

    def test_two_fault_tie_earlier_label(self):
        assert window_label(["F2", "F1", "F1", "F2"], "majority", "N") == "F1"

    def test_any_fault_picks_most_frequent_fault(self):
        assert window_label(["N", "N", "N", "F2", "F2", "F1"], "any_fault", "N") == "F2"

    def test_midpoint(self):
        assert window_label(["N", "F", "N"], "midpoint", "N") == "F"
        assert window_label(["N", "F", "X", "N"], "midpoint", "N") == "F"

    def test_unknown_rule(self):
        with pytest.raises(ConfigError):
            window_label(["N"], "mode", "N")
        with pytest.raises(ConfigError):
            segment(_series(10), 4, 2, rule="mode")
