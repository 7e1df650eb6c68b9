"""Online prediction: window adaptation, scripted replay, file tailing."""
import json
import warnings

import pytest

from conftest import trace_text

from ioperiod import replay, watch
from ioperiod.online import ADAPT_AFTER, MIN_WINDOW_BINS, WINDOW_PERIODS, _choose_window


def pulse_rows(n_pulses, period=8.1, phase_len=2.0, nbytes=10 ** 9):
    return [(0, j * period, j * period + phase_len, nbytes) for j in range(n_pulses)]


def pulse_schedule(triggers, period=8.1, phase_len=2.0):
    """One snapshot per trigger time, holding all pulses started by then."""
    snapshots = []
    for now in triggers:
        n_pulses = int(now // period) + 1
        snapshots.append((trace_text(pulse_rows(n_pulses, period, phase_len)), now))
    return snapshots


class TestWindowAdaptation:
    def test_first_prediction_uses_full_window(self):
        snapshots = pulse_schedule([24.3])
        (rec,) = replay(snapshots, fs=10.0)
        assert rec.window == (0.0, 24.3)

    def test_streak_shrinks_window(self):
        triggers = [24.3, 32.4, 40.5, 47.4]
        records = replay(pulse_schedule(triggers), fs=10.0)
        assert [r.has_dominant for r in records[:3]] == [True, True, True]
        # the first three analyses all land on exactly 8.1 s
        assert records[2].period == pytest.approx(8.1, abs=1e-12)
        lo, hi = records[3].window
        assert hi == 47.4
        assert lo == 47.4 - WINDOW_PERIODS * records[2].period
        assert lo == pytest.approx(23.1, abs=1e-9)

    def test_streak_resets_on_non_dominant(self):
        triggers = [24.3, 32.4, 40.5, 47.4]
        snapshots = pulse_schedule(triggers)
        # third snapshot carries no I/O volume: analysis finds nothing
        empty = trace_text([(0, 0.0, 40.5, 0)])
        snapshots[2] = (empty, 40.5)
        records = replay(snapshots, fs=10.0)
        assert not records[2].has_dominant
        assert records[2].dominant_streak == 0
        # the broken streak means the fourth analysis keeps the full window
        assert records[3].window == (0.0, 47.4)

    def test_fixed_window_overrides_adaptation(self):
        triggers = [24.3, 32.4, 40.5, 47.4]
        records = replay(pulse_schedule(triggers), fs=10.0, fixed_window=30.0)
        assert records[3].window == (47.4 - 30.0, 47.4)

    def test_min_window_guard(self):
        # a spuriously short period must not collapse the window below
        # MIN_WINDOW_BINS sampling intervals
        history = []

        class FakeRecord:
            has_dominant = True
            period = 0.001

        history = [FakeRecord()] * ADAPT_AFTER
        lo, hi = _choose_window(history, now=100.0, fs=1.0, fixed_window=None)
        assert hi - lo >= MIN_WINDOW_BINS / 1.0

    def test_replay_is_deterministic(self):
        snapshots = pulse_schedule([24.3, 32.4, 40.5, 47.4])
        runs = [replay(snapshots, fs=10.0) for _ in range(3)]
        dicts = [[json.dumps(r.to_dict(), sort_keys=True) for r in run] for run in runs]
        assert dicts[0] == dicts[1] == dicts[2]


class TestWatch:
    def test_single_append_yields_record(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        path.write_text(trace_text(pulse_rows(4)))
        records = list(watch(path, fs=10.0, poll_interval=0.01, idle_timeout=0.02,
                             _sleep=lambda s: None))
        assert len(records) == 1
        assert records[0].has_dominant

    def test_incremental_appends(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        chunks = [trace_text(pulse_rows(n)) for n in (3, 4, 5)]
        path.write_text(chunks[0])
        pending = chunks[1:]

        def fake_sleep(_):
            if pending:
                path.write_text(pending.pop(0))

        records = list(watch(path, fs=10.0, poll_interval=0.01, idle_timeout=0.03,
                             _sleep=fake_sleep))
        assert len(records) == 3
        assert [r.trigger_time for r in records] == [
            pytest.approx(2 * 8.1 + 2.0),
            pytest.approx(3 * 8.1 + 2.0),
            pytest.approx(4 * 8.1 + 2.0),
        ]

    def test_partial_line_not_consumed(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        full = trace_text(pulse_rows(4))
        # first write ends mid-line; the remainder arrives on the next poll
        cut = full.rindex('{"rank"') + 10
        path.write_text(full[:cut])
        pending = [full]

        def fake_sleep(_):
            if pending:
                path.write_text(pending.pop(0))

        records = list(watch(path, fs=10.0, poll_interval=0.01, idle_timeout=0.03,
                             _sleep=fake_sleep))
        # first snapshot holds 3 whole lines, the second all 4
        assert len(records) == 2
        assert records[0].trigger_time < records[1].trigger_time

    def test_truncation_resets_with_warning(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        path.write_text(trace_text(pulse_rows(5)))
        shorter = [trace_text(pulse_rows(3))]

        def fake_sleep(_):
            if shorter:
                path.write_text(shorter.pop(0))

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            records = list(watch(path, fs=10.0, poll_interval=0.01,
                                 idle_timeout=0.03, _sleep=fake_sleep))
        assert any("truncated" in str(w.message) for w in caught)
        assert len(records) == 2

    def test_no_appends_no_records(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        records = list(watch(path, fs=10.0, poll_interval=0.01, idle_timeout=0.02,
                             _sleep=lambda s: None))
        assert records == []
