"""In-memory event-log model.

An event log is a set of process instances (cases).  Each case carries an
ordered trace of events (activity, optional resource, timestamp) plus a
mapping of case-level sensitive attributes.  Timestamps are integer seconds
since the Unix epoch (UTC); after relativization they encode offsets from a
shared origin, which keeps timed matching a plain equality check.

Logs are immutable after construction and all operations here are pure
functions, safe for concurrent readers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

__all__ = [
    "TimestampAccuracy",
    "Perspective",
    "Event",
    "ProcessInstance",
    "EventLog",
    "ProjectedEvent",
    "LogError",
    "MissingResourceError",
    "project",
    "relative_timestamps",
    "relativize_log",
    "truncate_to_accuracy",
    "variants",
    "variant_frequency",
    "directly_follows",
    "discretize_sensitive",
]


class LogError(ValueError):
    """Raised when a log or an operation on it violates the model invariants."""


class MissingResourceError(LogError):
    """A resource-based perspective was applied to an event without a resource."""


class TimestampAccuracy(Enum):
    SECONDS = "seconds"
    MINUTES = "minutes"
    HOURS = "hours"
    DAYS = "days"

    @property
    def unit_seconds(self) -> int:
        return {"seconds": 1, "minutes": 60, "hours": 3600, "days": 86400}[self.value]

    @classmethod
    def parse(cls, text) -> "TimestampAccuracy":
        if isinstance(text, TimestampAccuracy):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise LogError(
                f"unknown timestamp accuracy {text!r}; expected one of "
                "seconds, minutes, hours, days"
            ) from None


class Perspective(Enum):
    """Which event fields a projection keeps."""

    A = "A"
    R = "R"
    AR = "AR"
    AT = "AT"
    RT = "RT"
    ART = "ART"

    @property
    def has_activity(self) -> bool:
        return "A" in self.value

    @property
    def has_resource(self) -> bool:
        return "R" in self.value

    @property
    def has_time(self) -> bool:
        return "T" in self.value

    @classmethod
    def parse(cls, text) -> "Perspective":
        if isinstance(text, Perspective):
            return text
        try:
            return cls(str(text).strip().upper())
        except ValueError:
            raise LogError(f"unknown perspective {text!r}") from None


@dataclass(frozen=True)
class Event:
    """A single event: activity label, optional resource, epoch-seconds timestamp."""

    activity: str
    resource: Optional[str]
    timestamp: int

    def __post_init__(self):
        if not self.activity:
            raise LogError("event activity label must be non-empty")
        if not isinstance(self.timestamp, int):
            object.__setattr__(self, "timestamp", int(self.timestamp))


@dataclass(frozen=True)
class ProcessInstance:
    """A case: unique id, non-empty time-ordered trace, sensitive attribute mapping."""

    case_id: str
    trace: tuple
    sensitive: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        trace = tuple(self.trace)
        object.__setattr__(self, "trace", trace)
        if not trace:
            raise LogError(f"case {self.case_id!r}: empty traces are not allowed")
        for a, b in zip(trace, trace[1:]):
            if b.timestamp < a.timestamp:
                raise LogError(
                    f"case {self.case_id!r}: events are not ordered by timestamp"
                )
        object.__setattr__(self, "sensitive", dict(self.sensitive))

    def __len__(self) -> int:
        return len(self.trace)


@dataclass(frozen=True)
class EventLog:
    """An immutable collection of process instances with declared sensitive attributes."""

    instances: tuple
    sensitive_attrs: tuple = ()

    def __post_init__(self):
        instances = tuple(self.instances)
        object.__setattr__(self, "instances", instances)
        object.__setattr__(self, "sensitive_attrs", tuple(self.sensitive_attrs))
        seen = set()
        for inst in instances:
            if inst.case_id in seen:
                raise LogError(f"duplicate case id {inst.case_id!r}")
            seen.add(inst.case_id)
            for attr in self.sensitive_attrs:
                if attr not in inst.sensitive:
                    raise LogError(
                        f"case {inst.case_id!r} lacks declared sensitive attribute {attr!r}"
                    )

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self) -> Iterator[ProcessInstance]:
        return iter(self.instances)

    @property
    def case_ids(self) -> tuple:
        return tuple(inst.case_id for inst in self.instances)

    @property
    def total_events(self) -> int:
        return sum(len(inst) for inst in self.instances)

    def activities(self) -> set:
        return {ev.activity for inst in self.instances for ev in inst.trace}

    def resources(self) -> set:
        return {
            ev.resource
            for inst in self.instances
            for ev in inst.trace
            if ev.resource is not None
        }

    def has_resources(self) -> bool:
        return all(
            ev.resource is not None for inst in self.instances for ev in inst.trace
        )


@dataclass(frozen=True)
class ProjectedEvent:
    """Event descriptor under a perspective: only the kept fields are non-None.

    ``time`` is the relative timestamp in whole units of the projection's
    accuracy (floor).  Descriptors compare and sort by (activity, resource,
    time), which is the canonical order used for every deterministic
    tie-break in this package.
    """

    activity: Optional[str] = None
    resource: Optional[str] = None
    time: Optional[int] = None

    def sort_key(self):
        return (
            self.activity or "",
            self.resource or "",
            self.time if self.time is not None else -1,
        )

    def __lt__(self, other):  # total order despite optional fields
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        parts = ""
        if self.activity is not None:
            parts += self.activity
        if self.resource is not None:
            parts += f"/{self.resource}"
        if self.time is not None:
            parts += f"@{self.time}"
        return parts or "?"


def project(
    trace: Sequence[Event],
    ps: Perspective,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
    case_id: Optional[str] = None,
) -> tuple:
    """Project a trace on a perspective, keeping exactly the perspective's fields.

    Timed perspectives express timestamps as whole accuracy units (floor).
    Raises :class:`MissingResourceError` when the perspective needs resources
    and an event has none.
    """
    unit = accuracy.unit_seconds
    out = []
    for ev in trace:
        if ps.has_resource and ev.resource is None:
            where = f" in case {case_id!r}" if case_id is not None else ""
            raise MissingResourceError(
                f"perspective {ps.value} requires a resource but event "
                f"{ev.activity!r}{where} has none"
            )
        out.append(
            ProjectedEvent(
                activity=ev.activity if ps.has_activity else None,
                resource=ev.resource if ps.has_resource else None,
                time=ev.timestamp // unit if ps.has_time else None,
            )
        )
    return tuple(out)


def project_instance(
    inst: ProcessInstance,
    ps: Perspective,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
) -> tuple:
    return project(inst.trace, ps, accuracy, case_id=inst.case_id)


def relative_timestamps(trace: Sequence[Event], t0: int = 0) -> tuple:
    """Rebase a trace so its first event is at ``t0``, preserving all gaps."""
    trace = tuple(trace)
    if not trace:
        return trace
    shift = t0 - trace[0].timestamp
    if shift == 0:
        return trace
    return tuple(
        Event(ev.activity, ev.resource, ev.timestamp + shift) for ev in trace
    )


def relativize_log(log: EventLog, t0: int = 0) -> EventLog:
    """Rebase every case to the shared origin ``t0`` (Unix epoch by default)."""
    return EventLog(
        tuple(
            ProcessInstance(
                inst.case_id, relative_timestamps(inst.trace, t0), inst.sensitive
            )
            for inst in log
        ),
        log.sensitive_attrs,
    )


def truncate_to_accuracy(log: EventLog, accuracy: TimestampAccuracy) -> EventLog:
    """Floor every timestamp to its accuracy-unit boundary (stable, idempotent)."""
    unit = accuracy.unit_seconds
    if unit == 1:
        return log
    return EventLog(
        tuple(
            ProcessInstance(
                inst.case_id,
                tuple(
                    Event(ev.activity, ev.resource, ev.timestamp - ev.timestamp % unit)
                    for ev in inst.trace
                ),
                inst.sensitive,
            )
            for inst in log
        ),
        log.sensitive_attrs,
    )


def variants(
    log: EventLog,
    ps: Perspective,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
):
    """Multiset of projected traces and the set of distinct ones (the variants)."""
    multiset = Counter(project_instance(inst, ps, accuracy) for inst in log)
    return multiset, set(multiset)


def variant_frequency(
    log: EventLog,
    ps: Perspective,
    variant: tuple,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
) -> float:
    """Relative frequency of one variant; frequencies over all variants sum to 1."""
    multiset, _ = variants(log, ps, accuracy)
    if variant not in multiset:
        raise LogError(f"variant {variant!r} does not occur in the log")
    return multiset[variant] / len(log)


def directly_follows(log: EventLog, ps: Perspective) -> dict:
    """Directly-follows counts over activities (ps=A) or resources (ps=R).

    The count of (x, y) is the total number of adjacent positions, over all
    instances, where x is immediately followed by y.
    """
    if ps not in (Perspective.A, Perspective.R):
        raise LogError(f"directly-follows is defined for perspectives A and R, not {ps.value}")
    counts: Counter = Counter()
    for inst in log:
        labels = project_instance(inst, ps)
        for a, b in zip(labels, labels[1:]):
            key = (
                a.activity if ps is Perspective.A else a.resource,
                b.activity if ps is Perspective.A else b.resource,
            )
            counts[key] += 1
    return dict(counts)


def discretize_sensitive(log: EventLog, attr: str) -> EventLog:
    """Discretize a numeric sensitive attribute into low / middle / high.

    Quartiles (linear interpolation) are computed over the per-case values;
    values strictly above Q3 become "high", strictly below Q1 "low",
    everything else "middle".
    """
    values = []
    for inst in log:
        v = inst.sensitive.get(attr)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise LogError(
                f"case {inst.case_id!r}: sensitive attribute {attr!r} has "
                f"non-numeric value {v!r}"
            )
        values.append(float(v))
    q1, q3 = np.percentile(values, [25, 75])
    relabeled = []
    for inst in log:
        v = float(inst.sensitive[attr])
        label = "high" if v > q3 else "low" if v < q1 else "middle"
        sens = dict(inst.sensitive)
        sens[attr] = label
        relabeled.append(ProcessInstance(inst.case_id, inst.trace, sens))
    return EventLog(tuple(relabeled), log.sensitive_attrs)
