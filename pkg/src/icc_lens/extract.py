"""ICC link extraction from method-execution traces using a component stack."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any, Mapping

from .errors import ValidationError
from .manifest import AppModel, ancestors
from .model import IccLink, LifecycleMethod
from .trace import EventKind, TraceEvent


@dataclass(frozen=True)
class ExtractorConfig:
    invalid_lifecycles: frozenset[LifecycleMethod] = frozenset(
        {LifecycleMethod.ON_STOP, LifecycleMethod.ON_DESTROY}
    )
    poly_window: int = 1
    stack_limit: int | None = None
    entry_reset: bool = True
    # lifecycle methods of the default entry that clear the stack below it
    entry_reset_on: frozenset[LifecycleMethod] = frozenset({LifecycleMethod.ON_CREATE})

    def __post_init__(self) -> None:
        if self.poly_window < 1:
            raise ValidationError("poly_window must be >= 1")
        if self.stack_limit is not None and self.stack_limit < 1:
            raise ValidationError("stack_limit must be >= 1")

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any]) -> ExtractorConfig:
        kw: dict[str, Any] = {}
        for key in ("invalid_lifecycles", "entry_reset_on"):
            if key in raw:
                try:
                    kw[key] = frozenset(LifecycleMethod(m) for m in raw[key])
                except ValueError as exc:
                    raise ValidationError(f"{key}: {exc}") from None
        for key in ("poly_window", "stack_limit"):
            if key in raw:
                kw[key] = int(raw[key])
        if "entry_reset" in raw:
            kw["entry_reset"] = bool(raw["entry_reset"])
        unknown = set(raw) - {"invalid_lifecycles", "entry_reset_on", "poly_window", "stack_limit", "entry_reset"}
        if unknown:
            raise ValidationError(f"unknown extractor option(s): {', '.join(sorted(unknown))}")
        return cls(**kw)


def remove_poly_calls(
    trace: Sequence[TraceEvent], model: AppModel, cfg: ExtractorConfig = ExtractorConfig()
) -> list[TraceEvent]:
    """Drop events that are really superclass bodies run on behalf of a subclass.

    An event logged for class ``B`` is dropped when an event with the same
    method name for a strict subclass of ``B`` lies within ``poly_window``
    positions of it. Events whose declaring class is an ancestor of their
    runtime component are dropped as well. Decisions are made against the
    original positions.
    """
    lineage = {}

    def supers(cls: str) -> list[str]:
        if cls not in lineage:
            lineage[cls] = ancestors(cls, model)
        return lineage[cls]

    keep = []
    n = len(trace)
    w = cfg.poly_window
    for i, ev in enumerate(trace):
        if ev.declaring_class != ev.component and ev.declaring_class in supers(ev.component):
            continue
        shadowed = False
        for j in range(max(0, i - w), min(n, i + w + 1)):
            other = trace[j]
            if j != i and other.method == ev.method and ev.component in supers(other.component):
                shadowed = True
                break
        if not shadowed:
            keep.append(ev)
    return keep


def is_valid_event(event: TraceEvent, cfg: ExtractorConfig = ExtractorConfig()) -> bool:
    if event.kind is EventKind.CALLBACK:
        return True
    if event.kind is EventKind.LIFECYCLE:
        return event.lifecycle not in cfg.invalid_lifecycles
    return False


def extract_iccs(
    trace: Iterable[TraceEvent], model: AppModel, cfg: ExtractorConfig = ExtractorConfig()
) -> list[IccLink]:
    """Extract ICC links in first-occurrence order, deduplicated by pair.

    A component seen for the first time is pushed and linked from the old
    top; a component already on the stack is moved to the top silently, as
    it was most likely reached with the back button.
    """
    events = remove_poly_calls(list(trace), model, cfg)
    # insertion order is bottom -> top; the last key is the top
    stack: dict[str, None] = {}
    found: dict[tuple[str, str], IccLink] = {}

    for ev in events:
        if not is_valid_event(ev, cfg):
            continue
        cpt = ev.component
        if cpt not in stack:
            prev_top = next(reversed(stack)) if stack else None
            stack[cpt] = None
            if prev_top is not None:
                found.setdefault((prev_top, cpt), IccLink(prev_top, cpt))
            if cfg.stack_limit is not None and len(stack) > cfg.stack_limit:
                del stack[next(iter(stack))]
        else:
            del stack[cpt]
            stack[cpt] = None
        if (
            cfg.entry_reset
            and cpt == model.default_entry
            and ev.lifecycle in cfg.entry_reset_on
            and len(stack) > 1
        ):
            stack = {cpt: None}
    return list(found.values())
