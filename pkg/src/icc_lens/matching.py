"""Explicit and implicit intent resolution against declared intent-filters."""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass, field

from .errors import ParseError, WrongIntentKind
from .manifest import AppModel
from .model import DataSpec, IccLink, IntentFilter, IntentKind, IntentPayload


@dataclass(frozen=True)
class PartialRecord:
    """A tool result that names the sender and intent fields but no target."""

    source: str
    intent: IntentPayload

    def to_json(self) -> dict:
        return {"source": self.source, "intent": self.intent.to_json()}

    @classmethod
    def from_json(cls, obj) -> PartialRecord:
        if not isinstance(obj, dict) or not obj.get("source") or "intent" not in obj:
            raise ParseError(f"partial record needs 'source' and 'intent': {obj!r}")
        return cls(obj["source"], IntentPayload.from_json(obj["intent"]))


def parse_records(text: str) -> list[PartialRecord]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if isinstance(doc, dict):
        doc = doc.get("records", [])
    return [PartialRecord.from_json(r) for r in doc]


def _mime_matches(pattern: str, mime: str) -> bool:
    if pattern == "*/*" or pattern == "*":
        return True
    p_type, _, p_sub = pattern.partition("/")
    m_type, _, m_sub = mime.partition("/")
    if p_type != m_type:
        return False
    return p_sub == "*" or p_sub == m_sub


def _data_spec_matches(spec: DataSpec, data: DataSpec) -> bool:
    if spec.scheme is not None and spec.scheme != data.scheme:
        return False
    if spec.host is not None and spec.host != data.host:
        return False
    if spec.path is not None and (data.path is None or not data.path.startswith(spec.path)):
        return False
    if spec.mime_type is not None and (data.mime_type is None or not _mime_matches(spec.mime_type, data.mime_type)):
        return False
    return True


def match_filter(intent: IntentPayload, flt: IntentFilter) -> bool:
    if intent.kind is not IntentKind.IMPLICIT:
        raise WrongIntentKind("filter matching applies to implicit intents only")
    if intent.action is None or intent.action not in flt.actions:
        return False
    if not intent.categories <= flt.categories:
        return False
    specs = [s for s in flt.data_specs if not s.is_empty]
    if intent.data is None or intent.data.is_empty:
        return not specs
    return any(_data_spec_matches(s, intent.data) for s in specs)


def resolve(intent: IntentPayload, model: AppModel) -> frozenset[str]:
    """Target component names for ``intent``.

    An explicit target is returned even when it is not registered; use
    ``target in model.components`` to tell the two apart.
    """
    if intent.kind is IntentKind.EXPLICIT:
        return frozenset({intent.target_component})
    return frozenset(
        name
        for name, comp in model.components.items()
        if any(match_filter(intent, f) for f in comp.filters)
    )


@dataclass
class Completion:
    links: list[IccLink] = field(default_factory=list)
    unresolved: list[PartialRecord] = field(default_factory=list)
    # explicit targets absent from the manifest, kept as reported
    unregistered: list[IccLink] = field(default_factory=list)


def complete_partial(records: Iterable[PartialRecord], model: AppModel) -> Completion:
    out = Completion()
    seen: set[tuple[str, str]] = set()
    for rec in records:
        targets = resolve(rec.intent, model)
        if not targets:
            out.unresolved.append(rec)
            continue
        for target in sorted(targets):
            link = IccLink(rec.source, target, intent=rec.intent)
            if link.pair in seen:
                continue
            seen.add(link.pair)
            out.links.append(link)
            if target not in model.components:
                out.unregistered.append(link)
    return out
