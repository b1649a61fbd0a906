import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlkcpriv import (
    LogError,
    Perspective,
    TimestampAccuracy,
    TlkcAnonymizer,
    dfg_compare,
    directly_follows,
    emd_data_utility,
    handover_compare,
    normalized_levenshtein,
)

from .conftest import build_log
from .oracles import brute_transport_cost, random_log

HOURS = TimestampAccuracy.HOURS

REFERENCE = dict(
    accuracy="hours", L=2, K=2, C=0.5, theta=0.25, bk="rel/ar", sensitive=("Disease",)
)


class TestLevenshtein:
    def test_equal_traces(self):
        assert normalized_levenshtein("abc", "abc") == 0.0

    def test_single_deletion(self):
        assert normalized_levenshtein("abc", "ab") == pytest.approx(1 / 3)

    def test_full_substitution(self):
        assert normalized_levenshtein("a", "b") == 1.0

    def test_both_empty(self):
        assert normalized_levenshtein("", "") == 0.0

    small = st.lists(st.sampled_from("abcd"), max_size=6).map(tuple)

    @given(s=small, t=small, u=small)
    @settings(max_examples=150, deadline=None)
    def test_metric_properties(self, s, t, u):
        d_st = normalized_levenshtein(s, t)
        assert 0.0 <= d_st <= 1.0
        assert (d_st == 0.0) == (s == t)
        assert d_st == normalized_levenshtein(t, s)
        assert d_st <= normalized_levenshtein(s, u) + normalized_levenshtein(u, t) + 1e-12


class TestEmd:
    def test_identity_is_exactly_one(self, hospital_log):
        report = emd_data_utility(hospital_log, hospital_log, Perspective.A)
        assert report.du == 1.0
        assert report.transport_cost == 0.0

    def test_single_pair(self):
        original = build_log({"1": [("a", None, 0), ("b", None, 60)]})
        anonymized = build_log({"1": [("a", None, 0)]})
        report = emd_data_utility(original, anonymized, Perspective.A)
        assert report.du == pytest.approx(0.5)

    def test_symmetry(self, hospital_log, treatment_log):
        ab = emd_data_utility(hospital_log, treatment_log, Perspective.A)
        ba = emd_data_utility(treatment_log, hospital_log, Perspective.A)
        assert ab.du == pytest.approx(ba.du, abs=1e-9)

    def test_range_on_random_pairs(self):
        rng = random.Random(17)
        for _ in range(10):
            a, b = random_log(rng), random_log(rng)
            du = emd_data_utility(a, b, Perspective.A).du
            assert -1e-9 <= du <= 1 + 1e-9

    def test_matches_bruteforce_grid(self):
        rng = random.Random(23)
        for _ in range(8):
            a = random_log(rng, max_cases=4, max_events=3)
            b = random_log(rng, max_cases=4, max_events=3)
            report = emd_data_utility(a, b, Perspective.A)
            from tlkcpriv import variants

            mult_a, _ = variants(a, Perspective.A)
            mult_b, _ = variants(b, Perspective.A)
            va = sorted(mult_a, key=lambda v: tuple(e.sort_key() for e in v))
            vb = sorted(mult_b, key=lambda v: tuple(e.sort_key() for e in v))
            steps = len(a) * len(b)
            wa = [mult_a[v] / len(a) for v in va]
            wb = [mult_b[v] / len(b) for v in vb]
            cost = [[normalized_levenshtein(x, y) for y in vb] for x in va]
            oracle = brute_transport_cost(wa, wb, cost, steps=steps)
            assert report.transport_cost == pytest.approx(oracle, abs=1e-6)

    def test_empty_log_rejected(self, hospital_log):
        from tlkcpriv import EventLog

        with pytest.raises(LogError):
            emd_data_utility(hospital_log, EventLog(()), Perspective.A)


class TestDfg:
    def test_identical_logs(self, hospital_log):
        cmp = dfg_compare(hospital_log, hospital_log)
        assert (cmp.fitness, cmp.precision, cmp.f1) == (1.0, 1.0, 1.0)

    def test_hand_computed_toy(self):
        original = build_log(
            {
                "1": [("a", None, 0), ("b", None, 1), ("c", None, 2)],
                "2": [("a", None, 0), ("b", None, 1), ("c", None, 2)],
            }
        )
        anonymized = build_log(
            {"1": [("a", None, 0), ("c", None, 2)], "2": [("a", None, 0), ("c", None, 2)]}
        )
        cmp = dfg_compare(original, anonymized)
        # all original edges touch b and disappear; (a,c) is new
        assert cmp.fitness == 0.0
        assert cmp.precision == pytest.approx(6 / 7)
        assert cmp.f1 == 0.0
        assert ("a", "c") in cmp.extra_edges

    def test_precision_one_without_new_edges(self, hospital_log):
        from tlkcpriv import suppress_global, ProjectedEvent

        # dropping the always-final activity cannot create new adjacencies
        anonymized, _ = suppress_global(
            hospital_log, [ProjectedEvent(activity="RL")], Perspective.A
        )
        cmp = dfg_compare(hospital_log, anonymized)
        assert cmp.precision == 1.0
        assert cmp.extra_edges == ()

    def test_counts_shared_with_log_core(self, hospital_log):
        df = directly_follows(hospital_log, Perspective.A)
        cmp = dfg_compare(hospital_log, hospital_log)
        assert cmp.fitness == sum(df.values()) / sum(df.values()) == 1.0

    def test_reference_pair(self, treatment_log):
        anonymized = TlkcAnonymizer(**REFERENCE).anonymize(treatment_log).log
        cmp = dfg_compare(treatment_log, anonymized)
        # suppression introduced the HO->BT adjacency, so one of the 16
        # original non-edges is lost: precision 15/16
        assert cmp.precision == pytest.approx(15 / 16)
        assert ("HO", "BT") in cmp.extra_edges

    def test_no_edges_rejected(self):
        log = build_log({"1": [("a", None, 0)]})
        with pytest.raises(LogError):
            dfg_compare(log, log)


class TestHandover:
    def test_identical_logs(self, hospital_log):
        cmp = handover_compare(hospital_log, hospital_log)
        assert (cmp.fitness, cmp.precision, cmp.f1) == (1.0, 1.0, 1.0)

    def test_known_edges_present(self, hospital_log):
        df = directly_follows(hospital_log, Perspective.R)
        assert ("E4", "D3") in df and ("E1", "E3") in df

    def test_single_resource_self_loop(self):
        log = build_log({"1": [("a", "r", 0), ("b", "r", 1)]})
        cmp = handover_compare(log, log)
        assert (cmp.fitness, cmp.precision, cmp.f1) == (1.0, 1.0, 1.0)

    def test_missing_resources_rejected(self, hospital_log):
        bare = build_log({"1": [("a", None, 0), ("b", None, 1)]})
        with pytest.raises(LogError):
            handover_compare(hospital_log, bare)

    def test_f1_is_harmonic_mean(self, treatment_log):
        anonymized = TlkcAnonymizer(**REFERENCE).anonymize(treatment_log).log
        cmp = handover_compare(treatment_log, anonymized)
        if cmp.fitness and cmp.precision:
            expected = 2 * cmp.fitness * cmp.precision / (cmp.fitness + cmp.precision)
            assert cmp.f1 == pytest.approx(expected)
