"""Adversary background knowledge: candidates, matching, enumeration.

Background knowledge comes in four types (set, multiset, sequence, timed
sequence) over three event attributes (activities, resources, both).  Each
(type, attribute) pair induces the perspective used to project traces before
containment is tested:

    set/mult/seq x ac -> A      rel x ac -> AT
    set/mult/seq x re -> R      rel x re -> RT
    set/mult/seq x ar -> AR     rel x ar -> ART

Timed candidates carry relative timestamps truncated to the chosen accuracy;
two timed events match when their kept fields and truncated times are equal,
so matching time differences reduces to plain equality once all traces share
one origin.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Iterator, Optional

from .log import (
    EventLog,
    LogError,
    Perspective,
    ProjectedEvent,
    TimestampAccuracy,
    project_instance,
)

__all__ = [
    "BkType",
    "BkAttr",
    "BkSpec",
    "Candidate",
    "CandidateSyntaxError",
    "ProjectedLog",
    "match",
    "confidence",
    "enumerate_candidates",
    "parse_candidate",
    "format_candidate",
]


class BkType(Enum):
    SET = "set"
    MULT = "mult"
    SEQ = "seq"
    REL = "rel"


class BkAttr(Enum):
    AC = "ac"
    RE = "re"
    AR = "ar"


_PERSPECTIVE = {
    (BkType.SET, BkAttr.AC): Perspective.A,
    (BkType.MULT, BkAttr.AC): Perspective.A,
    (BkType.SEQ, BkAttr.AC): Perspective.A,
    (BkType.SET, BkAttr.RE): Perspective.R,
    (BkType.MULT, BkAttr.RE): Perspective.R,
    (BkType.SEQ, BkAttr.RE): Perspective.R,
    (BkType.SET, BkAttr.AR): Perspective.AR,
    (BkType.MULT, BkAttr.AR): Perspective.AR,
    (BkType.SEQ, BkAttr.AR): Perspective.AR,
    (BkType.REL, BkAttr.AC): Perspective.AT,
    (BkType.REL, BkAttr.RE): Perspective.RT,
    (BkType.REL, BkAttr.AR): Perspective.ART,
}


@dataclass(frozen=True)
class BkSpec:
    """Type and attribute of the assumed background knowledge."""

    bk_type: BkType
    bk_attr: BkAttr

    @property
    def perspective(self) -> Perspective:
        return _PERSPECTIVE[(self.bk_type, self.bk_attr)]

    @property
    def ordered(self) -> bool:
        return self.bk_type in (BkType.SEQ, BkType.REL)

    @classmethod
    def parse(cls, text) -> "BkSpec":
        if isinstance(text, BkSpec):
            return text
        try:
            t, a = str(text).strip().lower().split("/")
            return cls(BkType(t), BkAttr(a))
        except ValueError:
            raise LogError(
                f"unknown background knowledge {text!r}; expected <type>/<attr> "
                "with type in {set,mult,seq,rel} and attr in {ac,re,ar}"
            ) from None

    def __str__(self) -> str:
        return f"{self.bk_type.value}/{self.bk_attr.value}"


@dataclass(frozen=True)
class Candidate:
    """One piece of background knowledge: elements plus the containment kind.

    ``elements`` is the canonical payload: for sets a sorted tuple of distinct
    descriptors, for multisets a sorted tuple with repetition, for (timed)
    sequences the tuple in temporal order.
    """

    bk_type: BkType
    elements: tuple

    def __post_init__(self):
        elements = tuple(self.elements)
        if not elements:
            raise LogError("candidates must contain at least one element")
        if self.bk_type in (BkType.SET, BkType.MULT):
            elements = tuple(sorted(elements, key=lambda e: e.sort_key()))
            if self.bk_type is BkType.SET and len(set(elements)) != len(elements):
                raise LogError("set candidates must not repeat elements")
        object.__setattr__(self, "elements", elements)

    @property
    def size(self) -> int:
        return len(self.elements)

    def sub_candidates(self) -> Iterator["Candidate"]:
        """All candidates one element smaller (drop one position / count)."""
        if self.size == 1:
            return
        seen = set()
        for i in range(len(self.elements)):
            rest = self.elements[:i] + self.elements[i + 1 :]
            sub = Candidate(self.bk_type, rest)
            if sub not in seen:
                seen.add(sub)
                yield sub

    def proper_sub_candidates(self) -> Iterator["Candidate"]:
        """Every non-empty proper sub-candidate, any size.

        The confidence condition is not monotone, so minimality cannot be
        established from the one-smaller level alone.
        """
        import itertools

        seen = set()
        for size in range(1, self.size):
            for positions in itertools.combinations(range(self.size), size):
                sub = Candidate(self.bk_type, tuple(self.elements[i] for i in positions))
                if sub not in seen:
                    seen.add(sub)
                    yield sub

    def __str__(self) -> str:
        return format_candidate(self)


def _contains(cand: Candidate, trace_elems: tuple, elem_set: frozenset, elem_counter) -> bool:
    kind = cand.bk_type
    if kind is BkType.SET:
        return all(e in elem_set for e in cand.elements)
    if kind is BkType.MULT:
        need = Counter(cand.elements)
        return all(elem_counter[e] >= n for e, n in need.items())
    it = iter(trace_elems)
    return all(e in it for e in cand.elements)  # subsequence


class ProjectedLog:
    """A log projected on the perspective induced by a background-knowledge spec.

    Precomputes per-case element sequences, sets and counters so repeated
    candidate matching is cheap.  ``accuracy`` bounds the timestamp precision
    available to the adversary (only relevant for timed perspectives).
    """

    def __init__(self, log: EventLog, spec: BkSpec, accuracy: TimestampAccuracy):
        self.log = log
        self.spec = spec
        self.accuracy = accuracy
        self.traces = tuple(
            project_instance(inst, spec.perspective, accuracy) for inst in log
        )
        self.elem_sets = tuple(frozenset(t) for t in self.traces)
        self.elem_counters = tuple(Counter(t) for t in self.traces)

    def match_indices(self, cand: Candidate) -> frozenset:
        return frozenset(
            i
            for i in range(len(self.traces))
            if _contains(cand, self.traces[i], self.elem_sets[i], self.elem_counters[i])
        )

    def instances(self, indices: Iterable[int]) -> tuple:
        return tuple(self.log.instances[i] for i in sorted(indices))


def match(
    log: EventLog,
    spec: BkSpec,
    cand: Candidate,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
) -> tuple:
    """Instances whose projected trace contains the candidate (type-specific containment)."""
    if cand.bk_type is not spec.bk_type:
        raise LogError(
            f"candidate kind {cand.bk_type.value} does not match spec {spec}"
        )
    plog = ProjectedLog(log, spec, accuracy)
    return plog.instances(plog.match_indices(cand))


def confidence(matched: Iterable, attr: str):
    """Per-value fractions of a sensitive attribute over a match set, plus the max.

    The fractions sum to 1; ``None`` values form their own class.
    """
    matched = tuple(matched)
    if not matched:
        raise LogError("confidence is undefined for an empty match set")
    counts = Counter(inst.sensitive.get(attr) for inst in matched)
    total = len(matched)
    dist = {value: n / total for value, n in counts.items()}
    return dist, max(dist.values())


def enumerate_candidates(
    log: EventLog,
    spec: BkSpec,
    max_size: int,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
    extend: Optional[Callable[[Candidate, frozenset], bool]] = None,
) -> Iterator[tuple]:
    """Yield (candidate, match indices) level-wise for sizes 1..max_size.

    Only candidates realized in at least one trace are produced, each exactly
    once.  ``extend`` decides whether a candidate's supersets are explored
    (by default all are); pruned branches are never generated.
    """
    plog = ProjectedLog(log, spec, accuracy)
    yield from _enumerate(plog, max_size, extend)


def _enumerate(plog: ProjectedLog, max_size, extend):
    spec = plog.spec
    if spec.ordered:
        yield from _enumerate_sequences(plog, max_size, extend)
    else:
        yield from _enumerate_bags(plog, max_size, extend)


def _enumerate_sequences(plog, max_size, extend):
    # PrefixSpan-style growth: state is, per supporting trace, the position
    # right after the earliest embedding of the pattern so far.
    def grow(prefix_elems, positions, size):
        extensions = {}
        for idx, start in positions.items():
            trace = plog.traces[idx]
            seen = set()
            for j in range(start, len(trace)):
                e = trace[j]
                if e in seen:
                    continue
                seen.add(e)
                extensions.setdefault(e, {})[idx] = j + 1
        for e in sorted(extensions, key=lambda x: x.sort_key()):
            nxt = extensions[e]
            cand = Candidate(plog.spec.bk_type, prefix_elems + (e,))
            matched = frozenset(nxt)
            yield cand, matched
            if size < max_size and (extend is None or extend(cand, matched)):
                yield from grow(prefix_elems + (e,), nxt, size + 1)

    yield from grow((), {i: 0 for i in range(len(plog.traces))}, 1)


def _enumerate_bags(plog, max_size, extend):
    is_set = plog.spec.bk_type is BkType.SET

    def capacity(idx, elems):
        need = Counter(elems)
        return all(plog.elem_counters[idx][e] >= n for e, n in need.items())

    def grow(elems, support, size):
        last = elems[-1] if elems else None
        pool = set()
        for idx in support:
            pool.update(plog.elem_sets[idx])
        for e in sorted(pool, key=lambda x: x.sort_key()):
            if last is not None:
                if is_set and e.sort_key() <= last.sort_key():
                    continue
                if not is_set and e.sort_key() < last.sort_key():
                    continue
            new = elems + (e,)
            matched = frozenset(i for i in support if capacity(i, new))
            if not matched:
                continue
            cand = Candidate(plog.spec.bk_type, new)
            yield cand, matched
            if size < max_size and (extend is None or extend(cand, matched)):
                yield from grow(new, matched, size + 1)

    yield from grow((), frozenset(range(len(plog.traces))), 1)


# --- candidate literal syntax ---------------------------------------------
#
# set        {a,b}            multiset   [a^2,b]
# sequence   <a,b>            timed      <a@3,b/r@7>
# elements:  act | act/res | /res, optionally @<units> for timed specs

_ELEMENT_RE = re.compile(
    r"^(?P<act>[^/@^]*?)(?:/(?P<res>[^/@^]+))?(?:@(?P<time>-?\d+))?(?:\^(?P<rep>\d+))?$"
)


class CandidateSyntaxError(LogError):
    def __init__(self, text: str, pos: int, message: str):
        super().__init__(f"cannot parse candidate {text!r} at position {pos}: {message}")
        self.pos = pos


def parse_candidate(text: str, spec: BkSpec) -> Candidate:
    """Parse a candidate literal for the given background-knowledge spec."""
    text = text.strip()
    brackets = {BkType.SET: "{}", BkType.MULT: "[]", BkType.SEQ: "<>", BkType.REL: "<>"}
    opener, closer = brackets[spec.bk_type]
    if not text.startswith(opener) or not text.endswith(closer):
        raise CandidateSyntaxError(
            text, 0, f"{spec.bk_type.value} candidates are written {opener}...{closer}"
        )
    body = text[1:-1].strip()
    if not body:
        raise CandidateSyntaxError(text, 1, "candidate has no elements")
    elements = []
    pos = 1
    for chunk in body.split(","):
        m = _ELEMENT_RE.match(chunk.strip())
        if not m:
            raise CandidateSyntaxError(text, pos, f"bad element {chunk.strip()!r}")
        act, res, time, rep = m.group("act"), m.group("res"), m.group("time"), m.group("rep")
        act = act or None
        if rep is not None and spec.bk_type is not BkType.MULT:
            raise CandidateSyntaxError(text, pos, "^count is only valid in multisets")
        if spec.bk_attr is BkAttr.AC and (res or not act):
            raise CandidateSyntaxError(text, pos, "activity-based elements are plain labels")
        if spec.bk_attr is BkAttr.RE:
            # bare labels denote resources; an explicit /res form also works
            if act and res:
                raise CandidateSyntaxError(text, pos, "resource-based elements carry no activity")
            if act and not res:
                act, res = None, act
            if not res:
                raise CandidateSyntaxError(text, pos, "missing resource label")
        if spec.bk_attr is BkAttr.AR and (not act or not res):
            raise CandidateSyntaxError(text, pos, "expected act/res element")
        if spec.bk_type is BkType.REL:
            if time is None:
                raise CandidateSyntaxError(text, pos, "timed candidates need @<units>")
        elif time is not None:
            raise CandidateSyntaxError(text, pos, "@<units> is only valid for rel candidates")
        elem = ProjectedEvent(
            activity=act if spec.bk_attr in (BkAttr.AC, BkAttr.AR) else None,
            resource=res if spec.bk_attr in (BkAttr.RE, BkAttr.AR) else None,
            time=int(time) if time is not None else None,
        )
        elements.extend([elem] * (int(rep) if rep else 1))
        pos += len(chunk) + 1
    return Candidate(spec.bk_type, tuple(elements))


def format_candidate(cand: Candidate) -> str:
    brackets = {BkType.SET: "{}", BkType.MULT: "[]", BkType.SEQ: "<>", BkType.REL: "<>"}
    opener, closer = brackets[cand.bk_type]
    if cand.bk_type is BkType.MULT:
        counts = Counter(cand.elements)
        parts = [
            f"{e}^{n}" if n > 1 else str(e)
            for e, n in sorted(counts.items(), key=lambda kv: kv[0].sort_key())
        ]
    else:
        parts = [str(e) for e in cand.elements]
    return opener + ",".join(parts) + closer
