import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tlkcpriv import (
    Event,
    EventLog,
    LogError,
    MissingResourceError,
    Perspective,
    ProcessInstance,
    ProjectedEvent,
    TimestampAccuracy,
    directly_follows,
    discretize_sensitive,
    project,
    relative_timestamps,
    relativize_log,
    truncate_to_accuracy,
    variant_frequency,
    variants,
)

from .conftest import HOUR, build_log
from .oracles import brute_directly_follows, random_log

HOURS = TimestampAccuracy.HOURS


def case(log, cid):
    return next(inst for inst in log if inst.case_id == cid)


class TestModel:
    def test_empty_trace_rejected(self):
        with pytest.raises(LogError, match="empty"):
            ProcessInstance("1", ())

    def test_unordered_trace_rejected(self):
        with pytest.raises(LogError, match="ordered"):
            ProcessInstance("1", (Event("a", None, 10), Event("b", None, 5)))

    def test_duplicate_case_ids_rejected(self):
        inst = ProcessInstance("1", (Event("a", None, 0),))
        with pytest.raises(LogError, match="duplicate"):
            EventLog((inst, inst))

    def test_missing_declared_sensitive_rejected(self):
        inst = ProcessInstance("1", (Event("a", None, 0),))
        with pytest.raises(LogError, match="sensitive"):
            EventLog((inst,), ("Disease",))

    def test_empty_activity_rejected(self):
        with pytest.raises(LogError):
            Event("", None, 0)


class TestProject:
    def test_hospital_case1_activity_resource(self, hospital_log):
        got = project(case(hospital_log, "1").trace, Perspective.AR)
        assert [(e.activity, e.resource) for e in got] == [
            ("RE", "E4"),
            ("VI", "D3"),
            ("RL", "E6"),
        ]

    def test_full_perspective_keeps_everything(self, hospital_log):
        trace = case(hospital_log, "2").trace
        got = project(trace, Perspective.ART, TimestampAccuracy.SECONDS)
        assert len(got) == len(trace)
        assert all(
            (p.activity, p.resource, p.time) == (e.activity, e.resource, e.timestamp)
            for p, e in zip(got, trace)
        )

    def test_hospital_case1_activity_only(self, hospital_log):
        got = project(case(hospital_log, "1").trace, Perspective.A)
        assert [e.activity for e in got] == ["RE", "VI", "RL"]
        assert all(e.resource is None and e.time is None for e in got)

    def test_length_preserved_everywhere(self, hospital_log):
        for inst in hospital_log:
            for ps in Perspective:
                assert len(project(inst.trace, ps, HOURS)) == len(inst.trace)

    def test_missing_resource_names_case(self):
        log = build_log({"42": [("a", None, 0)]})
        with pytest.raises(MissingResourceError, match="42"):
            project(case(log, "42").trace, Perspective.R, case_id="42")


class TestRelativeTimestamps:
    def test_half_hour_gap(self):
        trace = (Event("a", None, 10 * HOUR), Event("b", None, 10 * HOUR + 1800))
        got = relative_timestamps(trace, 0)
        assert [e.timestamp for e in got] == [0, 1800]

    def test_identity_when_already_at_origin(self):
        trace = (Event("a", None, 0), Event("b", None, 60))
        assert relative_timestamps(trace, 0) == trace

    def test_hospital_case6_offsets(self, hospital_log):
        got = relative_timestamps(case(hospital_log, "6").trace, 0)
        # gaps of 1h15m and 5h15m from the first event
        assert [e.timestamp for e in got] == [0, 75 * 60, 315 * 60]

    @given(
        stamps=st.lists(st.integers(0, 10**6), min_size=1, max_size=8),
        t0=st.integers(-1000, 1000),
    )
    def test_pairwise_differences_preserved(self, stamps, t0):
        stamps = sorted(stamps)
        trace = tuple(Event("a", None, s) for s in stamps)
        got = relative_timestamps(trace, t0)
        assert got[0].timestamp == t0
        for i in range(len(stamps)):
            for j in range(len(stamps)):
                assert got[i].timestamp - got[j].timestamp == stamps[i] - stamps[j]


class TestTruncate:
    def test_floor_to_hour(self):
        log = build_log({"1": [("a", None, 0)]})
        log = EventLog(
            (ProcessInstance("1", (Event("a", None, 32 * HOUR + 45 * 60),)),)
        )
        got = truncate_to_accuracy(log, HOURS)
        assert got.instances[0].trace[0].timestamp == 32 * HOUR

    def test_seconds_is_identity(self, hospital_log):
        assert truncate_to_accuracy(hospital_log, TimestampAccuracy.SECONDS) == hospital_log

    def test_idempotent_and_order_preserving(self, hospital_log):
        once = truncate_to_accuracy(hospital_log, HOURS)
        twice = truncate_to_accuracy(once, HOURS)
        assert once == twice
        for before, after in zip(hospital_log, once):
            assert [e.activity for e in before.trace] == [e.activity for e in after.trace]

    def test_treatment_log_hours_are_integral(self, treatment_log):
        got = truncate_to_accuracy(treatment_log, HOURS)
        assert got == treatment_log  # fixture already sits on hour boundaries
        hours = {e.timestamp // HOUR for inst in got for e in inst.trace}
        assert hours == {1, 4, 5, 6, 7, 8, 9}


class TestVariants:
    def test_hospital_activity_variants(self, hospital_log):
        multiset, unique = variants(hospital_log, Perspective.A)
        assert sum(multiset.values()) == 6
        assert len(unique) == 5  # cases 1 and 6 share RE,VI,RL

    def test_single_instance(self):
        log = build_log({"1": [("a", None, 0)]})
        multiset, unique = variants(log, Perspective.A)
        assert sum(multiset.values()) == 1 and len(unique) == 1

    def test_treatment_all_unique(self, treatment_log):
        _, unique = variants(treatment_log, Perspective.ART, HOURS)
        assert len(unique) == 8

    def test_frequency_of_shared_variant(self, hospital_log):
        v = tuple(ProjectedEvent(activity=a) for a in ("RE", "VI", "RL"))
        assert variant_frequency(hospital_log, Perspective.A, v) == pytest.approx(2 / 6)

    def test_frequency_of_unique_variant(self, treatment_log):
        multiset, _ = variants(treatment_log, Perspective.ART, HOURS)
        v = next(iter(multiset))
        assert variant_frequency(treatment_log, Perspective.ART, v, HOURS) == pytest.approx(1 / 8)

    def test_single_variant_log(self):
        log = build_log({"1": [("a", None, 0)], "2": [("a", None, 0)]})
        multiset, _ = variants(log, Perspective.A)
        v = next(iter(multiset))
        assert variant_frequency(log, Perspective.A, v) == 1.0

    def test_unknown_variant_rejected(self, hospital_log):
        with pytest.raises(LogError):
            variant_frequency(hospital_log, Perspective.A, (ProjectedEvent(activity="zz"),))

    def test_frequencies_sum_to_one(self):
        rng = random.Random(7)
        for _ in range(20):
            log = random_log(rng)
            multiset, unique = variants(log, Perspective.A)
            total = sum(variant_frequency(log, Perspective.A, v) for v in unique)
            assert abs(total - 1.0) < 1e-12


class TestDirectlyFollows:
    def test_hospital_re_vi_count(self, hospital_log):
        oracle = brute_directly_follows(hospital_log, Perspective.A)
        got = directly_follows(hospital_log, Perspective.A)
        assert got == oracle
        assert got[("RE", "VI")] == 4  # cases 1, 4, 5, 6 open with RE then VI

    def test_single_event_traces(self):
        log = build_log({"1": [("a", None, 0)], "2": [("b", None, 0)]})
        assert directly_follows(log, Perspective.A) == {}

    def test_repeating_pattern_counts(self):
        traces = {
            "1": [("a", "r", 0), ("b", "r", 1), ("a", "r", 2), ("b", "r", 3)],
            "2": [("a", "r", 0), ("b", "r", 1), ("a", "r", 2), ("b", "r", 3)],
        }
        got = directly_follows(build_log(traces), Perspective.A)
        assert got[("a", "b")] == 4 and got[("b", "a")] == 2

    def test_resource_perspective(self, hospital_log):
        got = directly_follows(hospital_log, Perspective.R)
        assert got == brute_directly_follows(hospital_log, Perspective.R)

    def test_rejects_other_perspectives(self, hospital_log):
        with pytest.raises(LogError):
            directly_follows(hospital_log, Perspective.AR)

    def test_matches_position_scan_on_random_logs(self):
        rng = random.Random(13)
        for _ in range(25):
            log = random_log(rng)
            for ps in (Perspective.A, Perspective.R):
                assert directly_follows(log, ps) == brute_directly_follows(log, ps)


class TestDiscretize:
    @staticmethod
    def _log(values):
        traces = {str(i): [("a", None, 0)] for i in range(len(values))}
        sens = {str(i): {"Age": v} for i, v in enumerate(values)}
        return build_log(traces, sens, attrs=("Age",))

    def test_uniform_range(self):
        log = discretize_sensitive(self._log(list(range(1, 101))), "Age")
        by_value = {int(i.case_id): i.sensitive["Age"] for i in log}
        assert by_value[98] == "high"  # value 99
        assert by_value[0] == "low"  # value 1
        assert by_value[49] == "middle"  # value 50, the median

    def test_four_values(self):
        log = discretize_sensitive(self._log([10, 20, 30, 40]), "Age")
        assert [i.sensitive["Age"] for i in log] == ["low", "middle", "middle", "high"]

    def test_non_numeric_names_case(self):
        log = build_log(
            {"7": [("a", None, 0)]}, {"7": {"Age": "old"}}, attrs=("Age",)
        )
        with pytest.raises(LogError, match="7"):
            discretize_sensitive(log, "Age")

    def test_hospital_ages(self, hospital_log):
        got = discretize_sensitive(hospital_log, "Age")
        labels = {i.case_id: i.sensitive["Age"] for i in got}
        # ages 22,30,32,29,35,35 -> Q1=29.25, Q3=34.25
        assert labels == {
            "1": "low",
            "2": "middle",
            "3": "middle",
            "4": "low",
            "5": "high",
            "6": "high",
        }
        # other attributes untouched
        assert {i.case_id: i.sensitive["Disease"] for i in got} == {
            i.case_id: i.sensitive["Disease"] for i in hospital_log
        }


class TestRelativizeLog:
    def test_every_case_starts_at_origin(self, hospital_log):
        got = relativize_log(hospital_log, 0)
        assert all(inst.trace[0].timestamp == 0 for inst in got)
        for before, after in zip(hospital_log, got):
            gaps_before = [
                e.timestamp - before.trace[0].timestamp for e in before.trace
            ]
            gaps_after = [e.timestamp for e in after.trace]
            assert gaps_before == gaps_after
