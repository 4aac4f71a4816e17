"""Method-execution trace events and the on-disk trace format."""

from __future__ import annotations

import enum
import json
from collections.abc import Iterable
from dataclasses import dataclass

from .errors import ParseError
from .model import LifecycleMethod


class EventKind(str, enum.Enum):
    LIFECYCLE = "lifecycle"
    CALLBACK = "callback"
    OTHER = "other"


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    component: str
    declaring_class: str
    method: str
    kind: EventKind

    def __post_init__(self) -> None:
        # A "lifecycle" event naming an unknown method is demoted to OTHER.
        if self.kind is EventKind.LIFECYCLE and LifecycleMethod.lookup(self.method) is None:
            object.__setattr__(self, "kind", EventKind.OTHER)

    @property
    def lifecycle(self) -> LifecycleMethod | None:
        if self.kind is EventKind.LIFECYCLE:
            return LifecycleMethod(self.method)
        return None

    def __str__(self) -> str:
        return f"{self.component}.{self.method}"


def lifecycle_event(seq: int, component: str, method: LifecycleMethod, declaring_class: str | None = None) -> TraceEvent:
    return TraceEvent(seq, component, declaring_class or component, method.value, EventKind.LIFECYCLE)


def make_trace(steps: Iterable[tuple[str, str]], start: int = 0) -> list[TraceEvent]:
    """Build a trace from ``(class, method)`` pairs, inferring the event kind.

    Lifecycle names map to lifecycle events, other ``on*`` names to callbacks
    and everything else to plain calls. The runtime component and declaring
    class are both the given class.
    """
    events = []
    for i, (cls, method) in enumerate(steps):
        if LifecycleMethod.lookup(method):
            kind = EventKind.LIFECYCLE
        elif method.startswith("on"):
            kind = EventKind.CALLBACK
        else:
            kind = EventKind.OTHER
        events.append(TraceEvent(start + i, cls, cls, method, kind))
    return events


def _event_from_fields(seq, component, declaring, method, kind, lineno: int) -> TraceEvent:
    try:
        seq = int(seq)
    except (TypeError, ValueError):
        raise ParseError(f"sequence number must be an integer, got {seq!r}", lineno) from None
    try:
        kind = EventKind(str(kind).strip().lower())
    except ValueError:
        raise ParseError(f"event kind must be lifecycle, callback or other, got {kind!r}", lineno) from None
    for label, value in (("component", component), ("declaring_class", declaring), ("method", method)):
        if not isinstance(value, str) or not value:
            raise ParseError(f"empty {label}", lineno)
    return TraceEvent(seq, component, declaring, method, kind)


def parse_trace(text: str) -> list[TraceEvent]:
    """Parse a trace file in TSV or JSON-lines form.

    TSV columns are ``seq, component, declaring_class, method, kind``; lines
    starting with ``#`` and blank lines are skipped. Sequence numbers must be
    strictly increasing.
    """
    events: list[TraceEvent] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("{"):
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, lineno, exc.colno) from None
            event = _event_from_fields(
                obj.get("seq"),
                obj.get("component"),
                obj.get("declaring_class"),
                obj.get("method"),
                obj.get("kind"),
                lineno,
            )
        else:
            fields = line.rstrip("\r\n").split("\t")
            if len(fields) != 5:
                raise ParseError(f"expected 5 tab-separated fields, got {len(fields)}", lineno)
            event = _event_from_fields(*(f.strip() for f in fields), lineno)
        if events and event.seq <= events[-1].seq:
            raise ParseError(f"sequence number {event.seq} does not increase", lineno)
        events.append(event)
    return events


def format_trace(events: Iterable[TraceEvent]) -> str:
    return "".join(
        f"{e.seq}\t{e.component}\t{e.declaring_class}\t{e.method}\t{e.kind.value}\n" for e in events
    )
