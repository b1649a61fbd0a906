"""Privacy analysis: the (T,L,K,C) audit, minimal violating traces, maximal
frequent traces, prefix trees and the two greedy scores.

A candidate with a non-empty match violates the requirements when fewer than
K cases match it, or when the adversary's confidence in a protected sensitive
value among the matching cases exceeds C.  The confidence bound is enforced
for each attribute's focal value: the most frequent value in the log, ties
resolved by first appearance in case order.  Bounding the best-supported
guess keeps the check consistent across candidate sizes (see README for the
full rationale and for the audit semantics this pins down).

Minimal violating candidates are found level-wise: a violating candidate is
never extended, because its supersets cannot be minimal.  The anonymity
condition K is anti-monotone, so this pruning loses nothing; the confidence
condition is not monotone, which is exactly why minimality is re-checked
explicitly against every proper sub-candidate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import ceil
from typing import Dict, Iterable, Optional

from .background import BkSpec, Candidate, ProjectedLog
from .log import (
    EventLog,
    LogError,
    Perspective,
    ProjectedEvent,
    TimestampAccuracy,
    project_instance,
)

__all__ = [
    "PrivacyParams",
    "Verdict",
    "MvtSet",
    "MftSet",
    "PrefixTree",
    "AuditReport",
    "focal_values",
    "is_violating",
    "audit_tlkc",
    "enumerate_mvt",
    "enumerate_mft",
    "score",
    "n_score",
]


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy requirements: timestamp accuracy T, knowledge bound L, anonymity
    threshold K, confidence bound C, plus the background-knowledge spec and
    the sensitive attributes under protection.

    ``theta`` (frequency threshold) is used by the classic greedy algorithm;
    ``alpha``/``beta`` weight privacy gain against utility loss in the
    normalized-score variant and must sum to 1.
    """

    accuracy: TimestampAccuracy
    L: int
    K: int
    C: float
    bk: BkSpec
    sensitive: tuple = ()
    theta: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "accuracy", TimestampAccuracy.parse(self.accuracy))
        object.__setattr__(self, "bk", BkSpec.parse(self.bk))
        object.__setattr__(self, "sensitive", tuple(self.sensitive))
        if self.L < 1:
            raise LogError("L must be a positive integer")
        if self.K < 1:
            raise LogError("K must be a positive integer")
        if not 0 < self.C <= 1:
            raise LogError("C must lie in (0, 1]")
        if self.theta is not None and not 0 <= self.theta <= 1:
            raise LogError("theta must lie in [0, 1]")
        if (self.alpha is None) != (self.beta is None):
            raise LogError("alpha and beta must be given together")
        if self.alpha is not None:
            if self.alpha < 0 or self.beta < 0 or abs(self.alpha + self.beta - 1) > 1e-9:
                raise LogError("alpha and beta must be non-negative and sum to 1")

    @property
    def perspective(self) -> Perspective:
        return self.bk.perspective


@dataclass(frozen=True)
class Verdict:
    """Outcome of checking one candidate: anonymity and confidence conditions."""

    match_size: int
    k_violation: bool
    c_violations: tuple = ()  # attribute names whose bound is exceeded
    max_confidence: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.k_violation and not self.c_violations

    def describe(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.k_violation:
            parts.append("k-violation")
        parts.extend(f"c-violation({a})" for a in self.c_violations)
        return "+".join(parts)


def focal_values(log: EventLog, attrs: Iterable[str]) -> Dict[str, object]:
    """The protected value per sensitive attribute: the log's most frequent
    value, ties resolved by first appearance in case order."""
    out = {}
    for attr in attrs:
        counts = Counter(inst.sensitive.get(attr) for inst in log)
        if not counts:
            continue
        best = max(counts.values())
        for inst in log:
            if counts[inst.sensitive.get(attr)] == best:
                out[attr] = inst.sensitive.get(attr)
                break
    return out


class _Checker:
    """Shared verdict machinery over one projected log."""

    def __init__(self, log: EventLog, params: PrivacyParams):
        self.params = params
        self.plog = ProjectedLog(log, params.bk, params.accuracy)
        self.focal = focal_values(log, params.sensitive)
        self.sensitive_rows = {
            attr: tuple(inst.sensitive.get(attr) for inst in log)
            for attr in params.sensitive
        }
        self._memo: Dict[Candidate, Verdict] = {}

    def verdict_for_indices(self, indices: frozenset) -> Verdict:
        n = len(indices)
        if n == 0:
            raise LogError("verdicts apply only to candidates with a non-empty match")
        k_viol = n < self.params.K
        c_viol = []
        max_conf = 0.0
        for attr, rows in self.sensitive_rows.items():
            hits = sum(1 for i in indices if rows[i] == self.focal[attr])
            conf = hits / n
            max_conf = max(max_conf, conf)
            if conf > self.params.C:
                c_viol.append(attr)
        return Verdict(n, k_viol, tuple(c_viol), max_conf)

    def verdict(self, cand: Candidate) -> Verdict:
        v = self._memo.get(cand)
        if v is None:
            v = self.verdict_for_indices(self.plog.match_indices(cand))
            self._memo[cand] = v
        return v


def is_violating(cand: Candidate, log: EventLog, params: PrivacyParams) -> Verdict:
    """Check one candidate against the privacy requirements.

    Raises if the candidate matches nothing: the requirements only constrain
    realized background knowledge.
    """
    checker = _Checker(log, params)
    indices = checker.plog.match_indices(cand)
    if not indices:
        raise LogError(f"candidate {cand} matches no case; nothing to check")
    return checker.verdict_for_indices(indices)


@dataclass(frozen=True)
class MvtSet:
    """Minimal violating candidates, each with its verdict.

    Every proper sub-candidate of every item is non-violating; an empty set
    is equivalent to the log satisfying the privacy requirements.
    """

    items: tuple  # of (Candidate, Verdict), canonically ordered

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    @property
    def candidates(self) -> tuple:
        return tuple(c for c, _ in self.items)

    def privacy_gain(self, e: ProjectedEvent) -> int:
        return sum(1 for c, _ in self.items if e in c.elements)


@dataclass(frozen=True)
class MftSet:
    """Maximal frequent subtraces with their supports."""

    items: tuple  # of (pattern tuple, support), canonically ordered
    threshold: int = 1

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def utility_loss(self, e: ProjectedEvent) -> int:
        return sum(1 for pattern, _ in self.items if e in pattern)


class PrefixTree:
    """Prefix tree over element sequences; each node is a descriptor with an
    occurrence count and every root-to-leaf path is one stored trace."""

    def __init__(self, sequences: Iterable[tuple] = ()):
        self.root: dict = {}
        self.counts: Counter = Counter()
        self.sequences: list = []
        for seq in sequences:
            self.insert(seq)

    def insert(self, seq: tuple) -> None:
        node = self.root
        for e in seq:
            node = node.setdefault(e, {})
            self.counts[e] += 1
        self.sequences.append(tuple(seq))

    def delete_containing(self, e: ProjectedEvent) -> int:
        """Drop every stored sequence containing the descriptor; returns how many."""
        keep, dropped = [], 0
        for seq in self.sequences:
            if e in seq:
                dropped += 1
                for x in seq:
                    self.counts[x] -= 1
            else:
                keep.append(seq)
        self._rebuild(keep)
        return dropped

    def _rebuild(self, sequences):
        self.root = {}
        self.counts = Counter()
        self.sequences = []
        for seq in sequences:
            self.insert(seq)

    def events(self) -> set:
        return {e for e, n in self.counts.items() if n > 0}

    def node_count(self) -> int:
        def walk(node):
            return sum(1 + walk(child) for child in node.values())

        return walk(self.root)

    def __bool__(self) -> bool:
        return bool(self.sequences)


def enumerate_mvt(log: EventLog, params: PrivacyParams) -> MvtSet:
    """All minimal violating candidates of size up to L.

    Level-wise generation that never extends a violating candidate (its
    strict supersets cannot be minimal); a candidate is emitted only when it
    violates and no proper sub-candidate of any size does.
    """
    checker = _Checker(log, params)
    items = []

    # the generator yields a candidate before asking whether to extend it,
    # so the verdict memo below is always populated in time
    def extend(cand: Candidate, indices: frozenset) -> bool:
        return checker._memo[cand].ok

    from .background import _enumerate

    for cand, indices in _enumerate(checker.plog, params.L, extend):
        verdict = checker.verdict_for_indices(indices)
        checker._memo[cand] = verdict
        if not verdict.ok and all(
            checker.verdict(sub).ok for sub in cand.proper_sub_candidates()
        ):
            items.append((cand, verdict))
    items.sort(key=lambda cv: (cv[0].size, tuple(e.sort_key() for e in cv[0].elements)))
    return MvtSet(tuple(items))


def enumerate_mft(
    log: EventLog,
    ps: Perspective,
    theta: float,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
    max_len: Optional[int] = None,
) -> MftSet:
    """Maximal frequent subtraces (subsequence semantics) of the projected log.

    A pattern is frequent when at least ceil(theta * #cases) cases contain
    it; maximal when no frequent pattern properly contains it.
    """
    if theta > 1:
        return MftSet((), threshold=len(log) + 1)
    traces = tuple(project_instance(inst, ps, accuracy) for inst in log)
    threshold = max(1, ceil(theta * len(traces)))
    if max_len is None:
        max_len = max((len(t) for t in traces), default=0)

    frequent: Dict[tuple, int] = {}

    def grow(prefix: tuple, positions: Dict[int, int]):
        extensions: Dict[ProjectedEvent, Dict[int, int]] = {}
        for idx, start in positions.items():
            trace = traces[idx]
            seen = set()
            for j in range(start, len(trace)):
                e = trace[j]
                if e in seen:
                    continue
                seen.add(e)
                extensions.setdefault(e, {})[idx] = j + 1
        for e, nxt in extensions.items():
            if len(nxt) < threshold:
                continue
            pattern = prefix + (e,)
            frequent[pattern] = len(nxt)
            if len(pattern) < max_len:
                grow(pattern, nxt)

    grow((), {i: 0 for i in range(len(traces))})

    def contained(small: tuple, big: tuple) -> bool:
        it = iter(big)
        return all(x in it for x in small)

    by_len = sorted(frequent, key=len, reverse=True)
    maximal = []
    for p in by_len:
        if not any(len(q) > len(p) and contained(p, q) for q in maximal):
            maximal.append(p)
    maximal.sort(key=lambda p: (len(p), tuple(e.sort_key() for e in p)))
    return MftSet(tuple((p, frequent[p]) for p in maximal), threshold=threshold)


@dataclass(frozen=True)
class AuditReport:
    satisfied: bool
    violations: tuple  # of (Candidate, Verdict)
    candidate_count: int
    params: PrivacyParams

    def lines(self) -> list:
        head = "satisfied" if self.satisfied else "NOT satisfied"
        out = [
            f"privacy audit: {head} "
            f"(T={self.params.accuracy.value}, L={self.params.L}, K={self.params.K}, "
            f"C={self.params.C}, bk={self.params.bk})",
            f"minimal violating candidates: {len(self.violations)}",
        ]
        for cand, verdict in self.violations:
            out.append(
                f"  {cand}  [{verdict.describe()}; matches={verdict.match_size}, "
                f"max_confidence={verdict.max_confidence:.3f}]"
            )
        return out

    def records(self) -> list:
        return [
            {
                "candidate": str(cand),
                "verdict": verdict.describe(),
                "match_size": verdict.match_size,
                "max_confidence": verdict.max_confidence,
            }
            for cand, verdict in self.violations
        ]


def audit_tlkc(log: EventLog, params: PrivacyParams) -> AuditReport:
    """Audit a log at timestamp accuracy T against the privacy requirements.

    The log is satisfied exactly when it contains no minimal violating
    candidate of any size up to L; the report lists the minimal violations,
    which witness every violation there is.
    """
    mvt = enumerate_mvt(log, params)
    return AuditReport(
        satisfied=len(mvt) == 0,
        violations=mvt.items,
        candidate_count=len(mvt),
        params=params,
    )


def score(e: ProjectedEvent, mvt: MvtSet, mft: MftSet) -> float:
    """Greedy suppression score: privacy gain over utility loss plus one."""
    pg = mvt.privacy_gain(e)
    if pg == 0:
        raise LogError(f"event {e} occurs in no minimal violating candidate")
    return pg / (mft.utility_loss(e) + 1)


def n_score(
    e: ProjectedEvent,
    mvt: MvtSet,
    log: EventLog,
    ps: Perspective,
    alpha: float,
    beta: float,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
) -> float:
    """Normalized score: alpha * relative privacy gain + beta * frequency-aware
    utility, both in [0, 1]."""
    if len(mvt) == 0:
        raise LogError("normalized score needs a non-empty set of minimal violations")
    rpg = mvt.privacy_gain(e) / len(mvt)
    covered = sum(1 for inst in log if e in project_instance(inst, ps, accuracy))
    nul = 1.0 - covered / len(log)
    return alpha * rpg + beta * nul
