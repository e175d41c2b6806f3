import numpy as np
import pytest

from tailwright import (
    DomainError,
    EmptyInputError,
    EventSeries,
    InsufficientDataError,
    ParseError,
    WaitingTimes,
    mean_interval,
    parse_events,
    waiting_times,
    write_events,
)


def write(tmp_path, text, name="events.csv"):
    path = tmp_path / name
    path.write_bytes(text.encode("utf-8"))
    return path


class TestParseEvents:
    def test_basic_two_column(self, tmp_path):
        path = write(
            tmp_path,
            "pair_side,timestamp\nAUDUSDask,3\nAUDUSDask,10\nEURUSDbid,7\n",
        )
        series = parse_events(path)
        assert [s.pair_side for s in series] == ["AUDUSDask", "EURUSDbid"]
        assert series[0].timestamps.tolist() == [3, 10]
        assert series[1].timestamps.tolist() == [7]

    def test_first_appearance_order(self, tmp_path):
        path = write(
            tmp_path,
            "pair_side,timestamp\nZZZask,1\nAAAbid,2\nZZZask,3\n",
        )
        series = parse_events(path)
        assert [s.pair_side for s in series] == ["ZZZask", "AAAbid"]

    def test_crlf(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\r\nX,1\r\nX,2\r\n")
        series = parse_events(path)
        assert series[0].timestamps.tolist() == [1, 2]

    def test_unsorted_input_sorted(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\nX,9\nX,2\nX,5\n")
        series = parse_events(path)
        assert series[0].timestamps.tolist() == [2, 5, 9]

    def test_day_column_partitions(self, tmp_path):
        path = write(
            tmp_path,
            "pair_side,timestamp,day\nX,5,d1\nX,3,d2\nX,9,d1\n",
        )
        series = parse_events(path)
        assert [(s.pair_side, s.day) for s in series] == [
            ("X", "d1"),
            ("X", "d2"),
        ]
        assert series[0].timestamps.tolist() == [5, 9]
        assert series[1].timestamps.tolist() == [3]

    def test_empty_file(self, tmp_path):
        path = write(tmp_path, "")
        with pytest.raises(EmptyInputError):
            parse_events(path)

    def test_header_only(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\n")
        with pytest.raises(EmptyInputError):
            parse_events(path)

    def test_bad_column_count_names_line(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\nX,1\nX,2,d,extra\n")
        with pytest.raises(ParseError, match="line 3"):
            parse_events(path)

    def test_non_integer_timestamp_names_line(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\nX,1\nX,oops\n")
        with pytest.raises(ParseError, match="line 3"):
            parse_events(path)

    def test_negative_timestamp(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\nX,-4\n")
        with pytest.raises(DomainError, match="line 2"):
            parse_events(path)

    def test_empty_pair_side(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\n,5\n")
        with pytest.raises(ParseError, match="line 2"):
            parse_events(path)

    def test_default_session_length(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\nX,100\n")
        assert parse_events(path)[0].session_length == 36000

    def test_session_length_grows_to_max_timestamp(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\nX,50000\n")
        assert parse_events(path)[0].session_length == 50000

    def test_explicit_session_length(self, tmp_path):
        path = write(tmp_path, "pair_side,timestamp\nX,10\n")
        assert parse_events(path, session_length=120)[0].session_length == 120


class TestWriteEvents:
    def test_round_trip(self, tmp_path):
        series = EventSeries("ABCask", np.array([1, 5, 5, 9]))
        path = tmp_path / "out.csv"
        write_events(path, [series])
        back = parse_events(path)
        assert back == [series]

    def test_round_trip_with_day(self, tmp_path):
        series = [
            EventSeries("X", np.array([1, 2]), day="d1"),
            EventSeries("X", np.array([3]), day="d2"),
        ]
        path = tmp_path / "out.csv"
        write_events(path, series)
        assert parse_events(path) == series

    def test_lf_line_endings(self, tmp_path):
        path = tmp_path / "out.csv"
        write_events(path, EventSeries("X", np.array([1])))
        raw = path.read_bytes()
        assert b"\r" not in raw
        assert raw == b"pair_side,timestamp\nX,1\n"


class TestEventSeries:
    def test_rejects_decreasing(self):
        with pytest.raises(DomainError):
            EventSeries("X", np.array([5, 3]))

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            EventSeries("X", np.array([-1, 3]))

    def test_rejects_beyond_session(self):
        with pytest.raises(DomainError):
            EventSeries("X", np.array([10]), session_length=5)

    def test_rejects_empty_name(self):
        with pytest.raises(DomainError):
            EventSeries("", np.array([1]))

    def test_empty_timestamps_allowed(self):
        series = EventSeries("X", np.array([], dtype=np.int64))
        assert series.timestamps.size == 0


class TestWaitingTimes:
    def test_diffs(self):
        wt = waiting_times(EventSeries("X", np.array([2, 5, 6, 16])))
        assert wt.values.tolist() == [3, 1, 10]
        assert wt.n_zero_collapsed == 0

    def test_zero_gaps_collapsed_and_counted(self):
        wt = waiting_times(EventSeries("X", np.array([2, 2, 5, 5, 5, 9])))
        assert wt.values.tolist() == [3, 4]
        assert wt.n_zero_collapsed == 3

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            waiting_times(EventSeries("X", np.array([4])))

    def test_values_validated(self):
        with pytest.raises(DomainError):
            WaitingTimes("X", np.array([1, 0]))


class TestMeanInterval:
    def test_spec_value(self):
        series = EventSeries("X", np.arange(805) * 44, session_length=36000)
        assert mean_interval(series) == pytest.approx(36000 / 805)
        assert round(mean_interval(series), 1) == 44.7

    def test_no_events(self):
        with pytest.raises(InsufficientDataError):
            mean_interval(EventSeries("X", np.array([], dtype=np.int64)))
