"""Core event-log model.

An :class:`EventLog` is a collection of cases; a :class:`Case` is a sequence
of events ordered by timestamp. Events carry an activity name, a timestamp,
an optional resource and lifecycle marker, and a free-form attribute map.
Attribute values are restricted to numbers, text, booleans and timestamps,
and a given key must carry one type throughout a log.

Logs are assembled in whatever order the source provides and then passed
through :func:`sort_and_validate`, which orders events, checks identifier
uniqueness and rebuilds the derived catalogs (activity alphabet, resource
set, attribute tables, time span). After that the log is treated as
immutable by the rest of the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from typing import Iterator

from .errors import (
    AttributeTypeMismatch,
    DuplicateEventId,
    EventInMultipleCases,
)

#: One microsecond, used to convert timestamp differences to exact integers.
_US = timedelta(microseconds=1)

#: Attribute type names used in the per-log attribute tables.
NUMBER = "number"
TEXT = "text"
BOOLEAN = "boolean"
TIMESTAMP = "timestamp"

#: Lifecycle markers recognised by the performance extractors.
LIFECYCLE_START = "start"
LIFECYCLE_COMPLETE = "complete"


def attribute_type(value) -> str:
    """Return the type tag for an attribute value.

    Booleans are checked before numbers because ``bool`` is a subtype of
    ``int`` in Python.
    """
    if isinstance(value, bool):
        return BOOLEAN
    if isinstance(value, (int, float)):
        return NUMBER
    if isinstance(value, datetime):
        return TIMESTAMP
    if isinstance(value, str):
        return TEXT
    raise TypeError(f"unsupported attribute value type: {type(value).__name__}")


@dataclass
class Event:
    """A single observed activity execution."""

    event_id: str
    case_id: str
    activity: str
    timestamp: datetime
    resource: str | None = None
    lifecycle: str | None = None
    attrs: dict = field(default_factory=dict)


@dataclass
class Case:
    """One process instance: its identifier, attributes and event sequence."""

    case_id: str
    attrs: dict = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)


@dataclass
class EventLog:
    """A validated collection of cases plus derived catalogs.

    ``activities`` and ``resources`` are sorted tuples so that feature row
    order never depends on ingestion order. ``span`` is the pair of earliest
    and latest event timestamps; the earliest one doubles as the reference
    instant for all interval arithmetic. ``meta`` carries ingestion notes
    (e.g. how many exotic lifecycle transitions were dropped) that the
    pipeline surfaces in report metadata.
    """

    cases: dict[str, Case] = field(default_factory=dict)
    activities: tuple[str, ...] = ()
    resources: tuple[str, ...] = ()
    event_attr_types: dict[str, str] = field(default_factory=dict)
    case_attr_types: dict[str, str] = field(default_factory=dict)
    span: tuple[datetime, datetime] | None = None
    meta: dict = field(default_factory=dict)

    def iter_events(self) -> Iterator[Event]:
        """Yield all events, case by case, in stored order."""
        for case in self.cases.values():
            yield from case.events

    @property
    def event_count(self) -> int:
        return sum(len(c.events) for c in self.cases.values())

    @property
    def case_count(self) -> int:
        return len(self.cases)

    @property
    def origin(self) -> datetime:
        """Reference instant: the earliest event timestamp."""
        if self.span is None:
            raise ValueError("empty log has no origin")
        return self.span[0]

    def offset_us(self, ts: datetime) -> int:
        """Offset of ``ts`` from the log origin in exact integer microseconds."""
        return (ts - self.origin) // _US


def sort_and_validate(log: EventLog) -> EventLog:
    """Order events, check identifiers and rebuild all derived catalogs.

    Events inside each case are sorted by timestamp with a stable sort, so
    simultaneous events keep their ingestion order. Raises
    :class:`DuplicateEventId` when an identifier repeats inside one case,
    :class:`EventInMultipleCases` when it appears across cases, and
    :class:`AttributeTypeMismatch` when one attribute key mixes types.
    """
    seen: dict[str, str] = {}
    activities: set[str] = set()
    resources: set[str] = set()
    event_types: dict[str, str] = {}
    case_types: dict[str, str] = {}
    lo: datetime | None = None
    hi: datetime | None = None

    cases: dict[str, Case] = {}
    for case in log.cases.values():
        events = sorted(case.events, key=lambda e: e.timestamp)
        for e in events:
            owner = seen.get(e.event_id)
            if owner == case.case_id:
                raise DuplicateEventId(
                    f"event id {e.event_id!r} occurs twice in case {case.case_id!r}"
                )
            if owner is not None:
                raise EventInMultipleCases(
                    f"event id {e.event_id!r} appears in cases {owner!r} and {case.case_id!r}"
                )
            if e.case_id != case.case_id:
                raise EventInMultipleCases(
                    f"event {e.event_id!r} carries case id {e.case_id!r} "
                    f"but is stored under case {case.case_id!r}"
                )
            seen[e.event_id] = case.case_id
            activities.add(e.activity)
            if e.resource is not None:
                resources.add(e.resource)
            _merge_types(event_types, e.attrs, where=f"event {e.event_id!r}")
            if lo is None or e.timestamp < lo:
                lo = e.timestamp
            if hi is None or e.timestamp > hi:
                hi = e.timestamp
        _merge_types(case_types, case.attrs, where=f"case {case.case_id!r}")
        cases[case.case_id] = replace(case, events=events)

    return EventLog(
        cases=cases,
        activities=tuple(sorted(activities)),
        resources=tuple(sorted(resources)),
        event_attr_types=event_types,
        case_attr_types=case_types,
        span=None if lo is None else (lo, hi),
        meta=dict(log.meta),
    )


def _merge_types(table: dict[str, str], attrs: dict, where: str) -> None:
    for key, value in attrs.items():
        t = attribute_type(value)
        prev = table.setdefault(key, t)
        if prev != t:
            raise AttributeTypeMismatch(
                f"attribute {key!r} is {prev} elsewhere but {t} at {where}"
            )


def project_attr(log: EventLog, key: str, level: str = "event") -> list:
    """Project an attribute across the log, returning the value multiset.

    At event level the built-in fields ``activity``, ``resource``,
    ``lifecycle`` and ``timestamp`` are served alongside free-form
    attributes; optional fields contribute only where set. Events or cases
    missing the key are skipped, so an unknown key yields an empty list
    rather than an error.
    """
    values: list = []
    if level == "event":
        for e in log.iter_events():
            if key == "activity":
                values.append(e.activity)
            elif key == "timestamp":
                values.append(e.timestamp)
            elif key == "resource":
                if e.resource is not None:
                    values.append(e.resource)
            elif key == "lifecycle":
                if e.lifecycle is not None:
                    values.append(e.lifecycle)
            elif key in e.attrs:
                values.append(e.attrs[key])
    elif level == "case":
        for case in log.cases.values():
            if key in case.attrs:
                values.append(case.attrs[key])
    else:
        raise ValueError(f"unknown attribute level: {level!r}")
    return values
