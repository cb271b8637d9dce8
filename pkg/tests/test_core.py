"""Interval grid, time conversions, and signal schedules."""

import pytest

from homedr.core import (
    INTERVALS_PER_DAY,
    ApplianceSpec,
    LoadCategory,
    NslActivityScript,
    SignalKind,
    SignalSchedule,
    SlRequest,
    ValidationError,
    deadline_interval,
    interval_end_time,
    interval_start_time,
    time_to_interval,
    value_at,
)


class TestTimeConversions:
    @pytest.mark.parametrize(
        "text,expected",
        [("00:00", 1), ("23:55", 288), ("07:00", 85), ("00:05", 2), ("12:00", 145)],
    )
    def test_start_semantics(self, text, expected):
        assert time_to_interval(text) == expected

    @pytest.mark.parametrize(
        "text,expected",
        [("10:30", 126), ("00:00", 288), ("24:00", 288), ("09:00", 108), ("00:05", 1)],
    )
    def test_deadline_semantics(self, text, expected):
        assert deadline_interval(text) == expected

    def test_round_trip_over_all_intervals(self):
        for k in range(1, INTERVALS_PER_DAY + 1):
            assert time_to_interval(interval_start_time(k)) == k

    def test_interval_end_times(self):
        assert interval_end_time(1) == "00:05"
        assert interval_end_time(288) == "24:00"
        assert interval_end_time(126) == "10:30"

    @pytest.mark.parametrize("bad", ["07:03", "7:3", "25:00", "aa:bb", "12:60", ""])
    def test_rejects_bad_times(self, bad):
        with pytest.raises(ValidationError):
            time_to_interval(bad)

    def test_rejects_midnight_alias_as_start(self):
        with pytest.raises(ValidationError):
            time_to_interval("24:00")

    def test_error_names_the_field(self):
        with pytest.raises(ValidationError) as err:
            time_to_interval("07:03", field="requests[2].s")
        assert "requests[2].s" in str(err.value)


class TestSignalSchedule:
    def test_flat_tariff_is_constant(self):
        sched = SignalSchedule.constant(SignalKind.TARIFF, 4.0)
        assert all(value_at(sched, k) == 4.0 for k in (1, 12, 144, 288))

    def test_hourly_lookup_block_boundaries(self):
        sched = SignalSchedule.from_hourly(SignalKind.TARIFF, list(range(1, 25)))
        assert value_at(sched, 12) == 1
        assert value_at(sched, 13) == 2
        assert value_at(sched, 288) == 24

    def test_static_pil_is_constant(self):
        sched = SignalSchedule.constant(SignalKind.PIL, 3.0)
        assert value_at(sched, 288) == 3.0

    def test_piecewise_constant_on_hour_blocks(self):
        sched = SignalSchedule.from_hourly(SignalKind.PIL, [1.0 + h for h in range(24)])
        for k in range(1, INTERVALS_PER_DAY + 1):
            block_start = ((k - 1) // 12) * 12 + 1
            assert value_at(sched, k) == value_at(sched, block_start)

    def test_rejects_wrong_length_and_nonpositive(self):
        with pytest.raises(ValidationError):
            SignalSchedule.from_hourly(SignalKind.TARIFF, [1.0] * 23)
        with pytest.raises(ValidationError):
            SignalSchedule.from_hourly(SignalKind.TARIFF, [1.0] * 23 + [0.0])

    def test_out_of_range_interval(self):
        sched = SignalSchedule.constant(SignalKind.TARIFF, 1.0)
        for bad in (0, 289, -5):
            with pytest.raises(ValidationError):
                value_at(sched, bad)


class TestApplianceSpec:
    def test_rejects_nonpositive_rating(self):
        with pytest.raises(ValidationError):
            ApplianceSpec("x", LoadCategory.ISL, 0.0)

    def test_category_groupings(self):
        assert LoadCategory.NISL.schedulable and LoadCategory.ISL.schedulable
        assert not LoadCategory.NINSL.schedulable and not LoadCategory.INSL.schedulable
        assert LoadCategory.ISL.interruptible and LoadCategory.INSL.interruptible
        assert not LoadCategory.NISL.interruptible


class TestSlRequest:
    def test_accepts_exact_fit(self):
        req = SlRequest("pump", s=85, f=126, r_min=120)
        assert req.r_intervals == 24
        assert req.latest_start == 103

    def test_rejects_window_too_short(self):
        with pytest.raises(ValidationError):
            SlRequest("pump", s=10, f=12, r_min=20)

    def test_rejects_non_multiple_run_time(self):
        with pytest.raises(ValidationError) as err:
            SlRequest("pump", s=1, f=20, r_min=7)
        assert "multiple of 5" in str(err.value)

    def test_rejects_submission_at_or_after_start(self):
        with pytest.raises(ValidationError):
            SlRequest("pump", s=85, f=126, r_min=120, submit_k=85)

    def test_reversed_window(self):
        with pytest.raises(ValidationError):
            SlRequest("pump", s=50, f=40, r_min=5)


class TestNslActivityScript:
    def test_span_membership(self):
        script = NslActivityScript({"tv": ((229, 270),), "fridge": ((1, 288),)})
        assert script.is_on("tv", 229) and script.is_on("tv", 270)
        assert not script.is_on("tv", 228) and not script.is_on("tv", 271)
        assert script.on_loads(230) == ["tv", "fridge"] or script.on_loads(230) == ["fridge", "tv"]

    def test_rejects_overlapping_spans(self):
        with pytest.raises(ValidationError):
            NslActivityScript({"tv": ((10, 20), (15, 30))})
