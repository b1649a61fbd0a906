"""Anonymization algorithms.

Four estimator-style transformers, all suppression-only (events are removed,
never invented or reordered):

* :class:`TlkcAnonymizer` -- greedy global suppression driven by the ratio of
  privacy gain (minimal violating candidates hit) to utility loss (maximal
  frequent subtraces hit).
* :class:`TlkcExtAnonymizer` -- same loop with the normalized score; utility
  is measured by variant coverage instead of maximal frequent subtraces.
* :class:`Baseline1` -- drop every case whose variant occurs fewer than k
  times.
* :class:`Baseline2` -- k-anonymize variants by removing events: globally
  suppress the rarest descriptor while frequencies still discriminate, then
  merge violating variant classes onto shared subtraces.

Every class follows the scikit-learn parameter protocol (``get_params`` /
``set_params``) and exposes ``transform(log)``; the richer result object is
returned by ``anonymize(log)``.
"""

from __future__ import annotations

import inspect
import itertools
import time
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .analysis import (
    MftSet,
    MvtSet,
    PrivacyParams,
    enumerate_mft,
    enumerate_mvt,
)
from .log import (
    EventLog,
    LogError,
    Perspective,
    ProcessInstance,
    ProjectedEvent,
    TimestampAccuracy,
    project_instance,
)

__all__ = [
    "SuppressionSet",
    "IterationRecord",
    "AnonymizationResult",
    "ParameterError",
    "suppress_global",
    "BaseAnonymizer",
    "TlkcAnonymizer",
    "TlkcExtAnonymizer",
    "Baseline1",
    "Baseline2",
]


class ParameterError(LogError):
    """The requested parameters cannot be met (e.g. they would empty the log)."""


@dataclass(frozen=True)
class SuppressionSet:
    """Winner descriptors in selection order; no duplicates."""

    descriptors: tuple = ()

    def __post_init__(self):
        descs = tuple(self.descriptors)
        if len(set(descs)) != len(descs):
            raise LogError("suppression set must not contain duplicates")
        object.__setattr__(self, "descriptors", descs)

    def __iter__(self):
        return iter(self.descriptors)

    def __len__(self):
        return len(self.descriptors)


@dataclass(frozen=True)
class IterationRecord:
    winner: ProjectedEvent
    score: float
    remaining_mvts: int


@dataclass(frozen=True)
class AnonymizationResult:
    log: EventLog
    suppression: SuppressionSet
    dropped_cases: tuple
    iterations: tuple
    events_removed: int
    runtime_seconds: float


def suppress_global(
    log: EventLog,
    descriptors: Iterable[ProjectedEvent],
    ps: Perspective,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
):
    """Remove every event whose projection equals one of the descriptors.

    Cases whose trace empties are dropped. Returns (new log, dropped ids).
    """
    targets = set(descriptors)
    kept_instances, dropped = [], []
    for inst in log:
        descs = project_instance(inst, ps, accuracy)
        kept = tuple(
            ev for ev, d in zip(inst.trace, descs) if d not in targets
        )
        if kept:
            kept_instances.append(ProcessInstance(inst.case_id, kept, inst.sensitive))
        else:
            dropped.append(inst.case_id)
    return EventLog(tuple(kept_instances), log.sensitive_attrs), tuple(dropped)


class BaseAnonymizer:
    """Parameter handling shared by the anonymizers (scikit-learn protocol)."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise LogError(f"unknown parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    def fit(self, log: EventLog, y=None):
        return self

    def fit_transform(self, log: EventLog, y=None) -> EventLog:
        return self.fit(log).transform(log)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


def _winner_sort_key(e: ProjectedEvent):
    return e.sort_key()


class _GreedyIndex:
    """Incremental privacy-gain / utility-loss bookkeeping for the greedy loops.

    Keeps, per descriptor, the number of still-alive minimal violations and
    frequent patterns containing it; deleting a winner touches only the items
    that actually contain it.
    """

    def __init__(self, mvt_sets, mft_sets):
        self.mvt_sets = mvt_sets
        self.mft_sets = mft_sets
        self.alive_mvts = set(range(len(mvt_sets)))
        self.alive_mfts = set(range(len(mft_sets)))
        self.pg: Counter = Counter()
        self.ul: Counter = Counter()
        self.ev_to_mvts: dict = {}
        self.ev_to_mfts: dict = {}
        for i, elems in enumerate(mvt_sets):
            for e in elems:
                self.pg[e] += 1
                self.ev_to_mvts.setdefault(e, []).append(i)
        for i, elems in enumerate(mft_sets):
            for e in elems:
                self.ul[e] += 1
                self.ev_to_mfts.setdefault(e, []).append(i)

    def events(self):
        return sorted((e for e, n in self.pg.items() if n > 0), key=_winner_sort_key)

    def delete_containing(self, winner):
        for i in self.ev_to_mvts.get(winner, ()):
            if i in self.alive_mvts:
                self.alive_mvts.remove(i)
                for e in self.mvt_sets[i]:
                    self.pg[e] -= 1
        for i in self.ev_to_mfts.get(winner, ()):
            if i in self.alive_mfts:
                self.alive_mfts.remove(i)
                for e in self.mft_sets[i]:
                    self.ul[e] -= 1


def _tie_key(seed: Optional[int]):
    """Tie-break order among equally scored descriptors.

    Default is the canonical descriptor order; a seed swaps in a
    deterministic pseudo-random order instead.
    """
    if seed is None:
        return _winner_sort_key
    from zlib import crc32

    def key(e: ProjectedEvent):
        return crc32(f"{seed}:{e}".encode()), e.sort_key()

    return key


class TlkcAnonymizer(BaseAnonymizer):
    """Greedy suppression until no minimal violating candidate remains.

    Repeatedly picks the descriptor with the highest privacy-gain to
    utility-loss ratio, prunes every minimal violating candidate and maximal
    frequent subtrace containing it, and finally suppresses the winners
    globally.  Ties break on higher privacy gain, then canonical descriptor
    order.  If global suppression drops emptied cases, the survivors are
    re-anonymized so the output always passes the audit.
    """

    def __init__(
        self,
        accuracy="hours",
        L=2,
        K=2,
        C=0.5,
        theta=0.5,
        bk="rel/ar",
        sensitive=(),
        max_pattern_len=None,
        tie_break=None,
    ):
        self.accuracy = accuracy
        self.L = L
        self.K = K
        self.C = C
        self.theta = theta
        self.bk = bk
        self.sensitive = sensitive
        self.max_pattern_len = max_pattern_len
        self.tie_break = tie_break

    def _params(self) -> PrivacyParams:
        if self.theta is None:
            raise LogError("theta is required for the classic greedy algorithm")
        return PrivacyParams(
            accuracy=self.accuracy,
            L=self.L,
            K=self.K,
            C=self.C,
            bk=self.bk,
            sensitive=tuple(self.sensitive),
            theta=self.theta,
        )

    def anonymize(self, log: EventLog) -> AnonymizationResult:
        started = time.perf_counter()
        params = self._params()
        ps = params.perspective
        original_events = log.total_events
        current = log
        all_winners: list = []
        all_iterations: list = []
        all_dropped: list = []

        while True:
            mvt = enumerate_mvt(current, params)
            if len(mvt) == 0:
                break
            mft = enumerate_mft(
                current, ps, params.theta, params.accuracy, self.max_pattern_len
            )
            winners, iterations = self._greedy(mvt, mft)
            current, dropped = suppress_global(current, winners, ps, params.accuracy)
            all_winners.extend(winners)
            all_iterations.extend(iterations)
            all_dropped.extend(dropped)
            if not current.instances:
                raise ParameterError(
                    f"suppression emptied the whole log; requirements are too strict "
                    f"(T={params.accuracy.value}, L={params.L}, K={params.K}, C={params.C})"
                )
            if not dropped:
                # no case vanished, so every remaining candidate kept its
                # match set and the log is guaranteed violation-free
                break

        return AnonymizationResult(
            log=current,
            suppression=SuppressionSet(tuple(all_winners)),
            dropped_cases=tuple(all_dropped),
            iterations=tuple(all_iterations),
            events_removed=original_events - current.total_events,
            runtime_seconds=time.perf_counter() - started,
        )

    def _greedy(self, mvt: MvtSet, mft: MftSet):
        state = _GreedyIndex(
            [set(c.elements) for c in mvt.candidates], [set(p) for p, _ in mft]
        )
        winners, iterations = [], []
        while state.alive_mvts:
            def rank(e):
                pg = state.pg[e]
                return pg / (state.ul.get(e, 0) + 1), pg

            events = state.events()
            best_rank = max(rank(e) for e in events)
            tied = [e for e in events if rank(e) == best_rank]
            winner = min(tied, key=_tie_key(self.tie_break))  # score, then PG, then tie order
            winners.append(winner)
            state.delete_containing(winner)
            iterations.append(
                IterationRecord(winner, best_rank[0], len(state.alive_mvts))
            )
        return winners, iterations

    def transform(self, log: EventLog) -> EventLog:
        result = self.anonymize(log)
        self.suppression_ = result.suppression
        self.iterations_ = result.iterations
        self.dropped_cases_ = result.dropped_cases
        self.events_removed_ = result.events_removed
        return result.log


class TlkcExtAnonymizer(BaseAnonymizer):
    """Greedy suppression with the normalized score.

    The winner maximizes ``alpha * relative privacy gain + beta * (1 -
    variant coverage)``; maximal frequent subtraces play no role.  The
    relative privacy gain is recomputed per iteration against the surviving
    minimal violating candidates, while variant coverage stays fixed to the
    input log.
    """

    def __init__(
        self,
        accuracy="hours",
        L=2,
        K=2,
        C=0.5,
        alpha=0.5,
        beta=0.5,
        bk="rel/ar",
        sensitive=(),
        tie_break=None,
    ):
        self.accuracy = accuracy
        self.L = L
        self.K = K
        self.C = C
        self.alpha = alpha
        self.beta = beta
        self.bk = bk
        self.sensitive = sensitive
        self.tie_break = tie_break

    def _params(self) -> PrivacyParams:
        return PrivacyParams(
            accuracy=self.accuracy,
            L=self.L,
            K=self.K,
            C=self.C,
            bk=self.bk,
            sensitive=tuple(self.sensitive),
            alpha=self.alpha,
            beta=self.beta,
        )

    def anonymize(self, log: EventLog) -> AnonymizationResult:
        started = time.perf_counter()
        params = self._params()
        ps = params.perspective
        original_events = log.total_events
        current = log
        all_winners: list = []
        all_iterations: list = []
        all_dropped: list = []

        while True:
            mvt = enumerate_mvt(current, params)
            if len(mvt) == 0:
                break
            coverage = self._coverage(current, ps, params.accuracy)
            winners, iterations = self._greedy(mvt, coverage, params)
            current, dropped = suppress_global(current, winners, ps, params.accuracy)
            all_winners.extend(winners)
            all_iterations.extend(iterations)
            all_dropped.extend(dropped)
            if not current.instances:
                raise ParameterError(
                    f"suppression emptied the whole log; requirements are too strict "
                    f"(T={params.accuracy.value}, L={params.L}, K={params.K}, C={params.C})"
                )
            if not dropped:
                break

        return AnonymizationResult(
            log=current,
            suppression=SuppressionSet(tuple(all_winners)),
            dropped_cases=tuple(all_dropped),
            iterations=tuple(all_iterations),
            events_removed=original_events - current.total_events,
            runtime_seconds=time.perf_counter() - started,
        )

    @staticmethod
    def _coverage(log: EventLog, ps: Perspective, accuracy: TimestampAccuracy):
        counts: Counter = Counter()
        for inst in log:
            for e in set(project_instance(inst, ps, accuracy)):
                counts[e] += 1
        n = len(log)
        return {e: c / n for e, c in counts.items()}

    def _greedy(self, mvt: MvtSet, coverage, params: PrivacyParams):
        state = _GreedyIndex([set(c.elements) for c in mvt.candidates], [])
        winners, iterations = [], []
        while state.alive_mvts:
            total = len(state.alive_mvts)

            def rank(e):
                rpg = state.pg[e] / total
                nul = 1.0 - coverage.get(e, 0.0)
                return params.alpha * rpg + params.beta * nul, state.pg[e]

            events = state.events()
            best_rank = max(rank(e) for e in events)
            tied = [e for e in events if rank(e) == best_rank]
            winner = min(tied, key=_tie_key(self.tie_break))
            winners.append(winner)
            state.delete_containing(winner)
            iterations.append(IterationRecord(winner, best_rank[0], len(state.alive_mvts)))
        return winners, iterations

    def transform(self, log: EventLog) -> EventLog:
        result = self.anonymize(log)
        self.suppression_ = result.suppression
        self.iterations_ = result.iterations
        self.dropped_cases_ = result.dropped_cases
        self.events_removed_ = result.events_removed
        return result.log


class Baseline1(BaseAnonymizer):
    """Keep a case only if its variant occurs at least k times."""

    def __init__(self, k=2, ps="ART", accuracy="hours"):
        self.k = k
        self.ps = ps
        self.accuracy = accuracy

    def anonymize(self, log: EventLog) -> AnonymizationResult:
        started = time.perf_counter()
        if self.k < 1:
            raise LogError("k must be a positive integer")
        ps = Perspective.parse(self.ps)
        accuracy = TimestampAccuracy.parse(self.accuracy)
        counts = Counter(project_instance(inst, ps, accuracy) for inst in log)
        kept, dropped = [], []
        for inst in log:
            if counts[project_instance(inst, ps, accuracy)] >= self.k:
                kept.append(inst)
            else:
                dropped.append(inst.case_id)
        out = EventLog(tuple(kept), log.sensitive_attrs)
        return AnonymizationResult(
            log=out,
            suppression=SuppressionSet(),
            dropped_cases=tuple(dropped),
            iterations=(),
            events_removed=log.total_events - out.total_events,
            runtime_seconds=time.perf_counter() - started,
        )

    def transform(self, log: EventLog) -> EventLog:
        result = self.anonymize(log)
        self.dropped_cases_ = result.dropped_cases
        self.events_removed_ = result.events_removed
        return result.log


def _is_subsequence(small: tuple, big: tuple) -> bool:
    it = iter(big)
    return all(x in it for x in small)


def _longest_common_subsequence(a: tuple, b: tuple) -> tuple:
    dp = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            dp[i + 1][j + 1] = dp[i][j] + 1 if x == y else max(dp[i][j + 1], dp[i + 1][j])
    out = []
    i, j = len(a), len(b)
    while i and j:
        if a[i - 1] == b[j - 1] and dp[i][j] == dp[i - 1][j - 1] + 1:
            out.append(a[i - 1])
            i -= 1
            j -= 1
        elif dp[i - 1][j] >= dp[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return tuple(reversed(out))


def _earliest_embedding(small: tuple, big: tuple) -> tuple:
    pos, i = [], 0
    for x in small:
        while big[i] != x:
            i += 1
        pos.append(i)
        i += 1
    return tuple(pos)


def _canon(seq: tuple) -> tuple:
    return tuple(e.sort_key() for e in seq)


class Baseline2(BaseAnonymizer):
    """k-anonymize trace variants by removing events.

    Two regimes drive each violating variant to the most similar subtrace
    whose class reaches k occurrences:

    1. While descriptor frequencies still discriminate (not all equal among
       events of violating traces), the globally rarest such descriptor is
       suppressed from every trace; ties break canonically.  Global
       suppression never splits a variant class, so satisfied classes stay
       satisfied.
    2. Once frequencies are uniform they carry no more signal, and the
       algorithm switches to structural merging for good: a violating class
       is absorbed into a class whose variant is a proper subtrace of its
       own (longest target first, earliest embedding on ties), or failing
       that, two violating classes coalesce onto their longest common
       subtrace.  A violating class with no partner at all is dropped.

    Both regimes only ever shorten traces, so the result's projections are
    subsequences of the input's and the loop terminates with every surviving
    variant occurring at least k times.
    """

    def __init__(self, k=2, ps="ART", accuracy="hours"):
        self.k = k
        self.ps = ps
        self.accuracy = accuracy

    def anonymize(self, log: EventLog) -> AnonymizationResult:
        started = time.perf_counter()
        if self.k < 1:
            raise LogError("k must be a positive integer")
        ps = Perspective.parse(self.ps)
        accuracy = TimestampAccuracy.parse(self.accuracy)

        # per case: surviving (event index, descriptor) pairs
        state = {
            inst.case_id: list(enumerate(project_instance(inst, ps, accuracy)))
            for inst in log
        }
        structural = False

        while True:
            live = {cid: pairs for cid, pairs in state.items() if pairs}
            classes: dict = {}
            for cid, pairs in live.items():
                classes.setdefault(tuple(d for _, d in pairs), []).append(cid)
            violating = {
                rep: cids for rep, cids in classes.items() if len(cids) < self.k
            }
            if not violating:
                break

            if not structural:
                gfreq: Counter = Counter(
                    d for pairs in live.values() for _, d in pairs
                )
                eligible = sorted(
                    {d for rep in violating for d in rep}, key=lambda d: d.sort_key()
                )
                if len({gfreq[d] for d in eligible}) > 1:
                    target = min(eligible, key=lambda d: (gfreq[d], d.sort_key()))
                    for cid in state:
                        state[cid] = [
                            (i, d) for i, d in state[cid] if d != target
                        ]
                    continue
                structural = True

            if not self._merge_step(state, live, classes, violating):
                # no structural move left: drop the canonically first
                # violating class, mirroring full removal of hopeless variants
                rep = min(violating, key=_canon)
                for cid in violating[rep]:
                    state[cid] = []

        kept_instances = []
        dropped = []
        case_index = {inst.case_id: inst for inst in log}
        for inst in log:
            pairs = state[inst.case_id]
            if pairs:
                kept = tuple(inst.trace[i] for i, _ in pairs)
                kept_instances.append(
                    ProcessInstance(inst.case_id, kept, inst.sensitive)
                )
            else:
                dropped.append(inst.case_id)
        out = EventLog(tuple(kept_instances), log.sensitive_attrs)
        return AnonymizationResult(
            log=out,
            suppression=SuppressionSet(),
            dropped_cases=tuple(dropped),
            iterations=(),
            events_removed=log.total_events - out.total_events,
            runtime_seconds=time.perf_counter() - started,
        )

    def _merge_step(self, state, live, classes, violating) -> bool:
        # absorb: violating class onto an existing proper-subtrace class
        for rep in sorted(violating, key=_canon):
            options = [
                u
                for u in classes
                if u != rep
                and len(u) < len(rep)
                and _is_subsequence(u, rep)
                and len(classes[u]) + len(classes[rep]) >= self.k
            ]
            if options:
                best_len = max(len(u) for u in options)
                options = [u for u in options if len(u) == best_len]
                target = min(options, key=lambda u: (_earliest_embedding(u, rep), _canon(u)))
                self._map_class(state, live, classes[rep], target)
                return True
        # coalesce: two violating classes onto their longest common subtrace
        best = None
        for u, v in itertools.combinations(sorted(violating, key=_canon), 2):
            common = _longest_common_subsequence(u, v)
            if common and len(classes[u]) + len(classes[v]) >= self.k:
                key = (-len(common), _canon(common), _canon(u), _canon(v))
                if best is None or key < best[0]:
                    best = (key, u, v, common)
        if best is not None:
            _, u, v, common = best
            self._map_class(state, live, classes[u] + classes[v], common)
            return True
        return False

    @staticmethod
    def _map_class(state, live, case_ids, target: tuple):
        for cid in case_ids:
            pairs = live[cid]
            descs = tuple(d for _, d in pairs)
            kept_positions = _earliest_embedding(target, descs)
            state[cid] = [pairs[p] for p in kept_positions]

    def transform(self, log: EventLog) -> EventLog:
        result = self.anonymize(log)
        self.dropped_cases_ = result.dropped_cases
        self.events_removed_ = result.events_removed
        return result.log
