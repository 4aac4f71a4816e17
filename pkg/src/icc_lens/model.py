"""Shared domain types and the 25-tag ICC characteristic taxonomy."""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

from .errors import EmptyInput, ParseError, UnknownTag, ValidationError


class ComponentKind(str, enum.Enum):
    ACTIVITY = "activity"
    SERVICE = "service"
    RECEIVER = "receiver"
    PROVIDER = "provider"
    FRAGMENT = "fragment"
    NON_COMPONENT = "non-component"

    @property
    def is_basic(self) -> bool:
        return self in BASIC_KINDS


BASIC_KINDS = frozenset(
    {ComponentKind.ACTIVITY, ComponentKind.SERVICE, ComponentKind.RECEIVER, ComponentKind.PROVIDER}
)


class LifecycleMethod(str, enum.Enum):
    ON_CREATE = "onCreate"
    ON_START = "onStart"
    ON_RESUME = "onResume"
    ON_PAUSE = "onPause"
    ON_STOP = "onStop"
    ON_DESTROY = "onDestroy"
    ON_RESTART = "onRestart"

    @classmethod
    def lookup(cls, name: str) -> LifecycleMethod | None:
        try:
            return cls(name)
        except ValueError:
            return None


@dataclass(frozen=True)
class DataSpec:
    scheme: str | None = None
    host: str | None = None
    path: str | None = None
    mime_type: str | None = None

    def __post_init__(self) -> None:
        if self.host is not None and self.scheme is None:
            raise ValidationError(f"data host {self.host!r} given without a scheme")

    @property
    def is_empty(self) -> bool:
        return self.scheme is None and self.host is None and self.path is None and self.mime_type is None

    def to_json(self) -> dict[str, str]:
        out = {}
        for key in ("scheme", "host", "path", "mime_type"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> DataSpec:
        if not isinstance(obj, Mapping):
            raise ParseError("data spec must be an object")
        return cls(
            scheme=obj.get("scheme"),
            host=obj.get("host"),
            path=obj.get("path"),
            mime_type=obj.get("mime_type"),
        )


@dataclass(frozen=True)
class IntentFilter:
    actions: frozenset[str] = frozenset()
    categories: frozenset[str] = frozenset()
    data_specs: tuple[DataSpec, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "actions": sorted(self.actions),
            "categories": sorted(self.categories),
            "data": [d.to_json() for d in self.data_specs],
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> IntentFilter:
        return cls(
            actions=frozenset(obj.get("actions", ())),
            categories=frozenset(obj.get("categories", ())),
            data_specs=tuple(DataSpec.from_json(d) for d in obj.get("data", ())),
        )


@dataclass(frozen=True)
class Component:
    name: str
    kind: ComponentKind
    exported: bool = False
    main_entry: bool = False
    filters: tuple[IntentFilter, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValidationError("component name must be non-empty")
        if self.kind not in BASIC_KINDS:
            raise ValidationError(f"{self.name}: {self.kind.value} cannot be manifest-registered")
        if self.main_entry and not self.exported:
            raise ValidationError(f"{self.name}: main entry must be exported")


class IntentKind(str, enum.Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


@dataclass(frozen=True)
class IntentPayload:
    kind: IntentKind
    target_component: str | None = None
    action: str | None = None
    categories: frozenset[str] = frozenset()
    data: DataSpec | None = None
    extras: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.kind is IntentKind.EXPLICIT and not self.target_component:
            raise ValidationError("explicit intent requires a target component")
        if self.kind is IntentKind.IMPLICIT and self.target_component is not None:
            raise ValidationError("implicit intent cannot name a target component")

    @classmethod
    def explicit(cls, target: str, **kw: Any) -> IntentPayload:
        return cls(IntentKind.EXPLICIT, target_component=target, **kw)

    @classmethod
    def implicit(cls, action: str | None = None, categories: Iterable[str] = (), **kw: Any) -> IntentPayload:
        return cls(IntentKind.IMPLICIT, action=action, categories=frozenset(categories), **kw)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value}
        if self.target_component is not None:
            out["target"] = self.target_component
        if self.action is not None:
            out["action"] = self.action
        out["categories"] = sorted(self.categories)
        if self.data is not None:
            out["data"] = self.data.to_json()
        out["extras"] = sorted(self.extras)
        return out

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> IntentPayload:
        if not isinstance(obj, Mapping):
            raise ParseError("intent must be an object")
        try:
            kind = IntentKind(obj.get("kind"))
        except ValueError:
            raise ParseError(f"intent kind must be 'explicit' or 'implicit', got {obj.get('kind')!r}") from None
        data = obj.get("data")
        try:
            return cls(
                kind=kind,
                target_component=obj.get("target"),
                action=obj.get("action"),
                categories=frozenset(obj.get("categories", ())),
                data=DataSpec.from_json(data) if data is not None else None,
                extras=frozenset(obj.get("extras", ())),
            )
        except ValidationError as exc:
            raise ParseError(str(exc)) from None


class ExitKind(str, enum.Enum):
    NORMAL = "normal"
    ATYPICAL = "atypical"


class Tag(str, enum.Enum):
    # Component
    ACTIVITY = "Activity"
    SERVICE = "Service"
    BROADCAST = "Broadcast"
    DYNAMIC_BROADCAST = "DynamicBroadcast"
    # Non-Component
    FRAGMENT = "Fragment"
    ADAPTER = "Adapter"
    WIDGET = "Widget"
    OTHER_CLASS = "OtherClass"
    # Entry Method
    LIFECYCLE = "Lifecycle"
    DYNAMIC = "Dynamic"
    IMPLICIT = "Implicit"
    STATIC = "Static"
    # Exit Method
    NORMAL = "Normal"
    ATYPICAL = "Atypical"
    # Method Call
    BASIC = "Basic"
    CALLBACK_LISTENER = "CallbackListener"
    ASYNCHRONOUS = "Asynchronous"
    POLYMORPHIC = "Polymorphic"
    LIBRARY_METHOD = "LibraryMethod"
    # Intent Type
    EXPLICIT_INTENT = "ExplicitIntent"
    IMPLICIT_INTENT = "ImplicitIntent"
    # Intent Field Value
    CONTEXT_RELATED = "ContextRelated"
    STATIC_VALUE = "StaticValue"
    EXTRA_DATA = "ExtraData"
    STRING_OPERATION = "StringOperation"

    @classmethod
    def parse(cls, value: str | Tag) -> Tag:
        if isinstance(value, Tag):
            return value
        try:
            return cls(value)
        except ValueError:
            raise UnknownTag(str(value)) from None


TAG_CATEGORIES: dict[str, tuple[Tag, ...]] = {
    "Component": (Tag.ACTIVITY, Tag.SERVICE, Tag.BROADCAST, Tag.DYNAMIC_BROADCAST),
    "Non-Component": (Tag.FRAGMENT, Tag.ADAPTER, Tag.WIDGET, Tag.OTHER_CLASS),
    "Entry Method": (Tag.LIFECYCLE, Tag.DYNAMIC, Tag.IMPLICIT, Tag.STATIC),
    "Exit Method": (Tag.NORMAL, Tag.ATYPICAL),
    "Method Call": (
        Tag.BASIC,
        Tag.CALLBACK_LISTENER,
        Tag.ASYNCHRONOUS,
        Tag.POLYMORPHIC,
        Tag.LIBRARY_METHOD,
    ),
    "Intent Type": (Tag.EXPLICIT_INTENT, Tag.IMPLICIT_INTENT),
    "Intent Field Value": (
        Tag.CONTEXT_RELATED,
        Tag.STATIC_VALUE,
        Tag.EXTRA_DATA,
        Tag.STRING_OPERATION,
    ),
}

ALL_TAGS: tuple[Tag, ...] = tuple(t for group in TAG_CATEGORIES.values() for t in group)
CATEGORY_OF: dict[Tag, str] = {t: cat for cat, group in TAG_CATEGORIES.items() for t in group}

# Tags every ordinary ICC carries some variant of; the remaining 18 are the
# characteristics analysed in isolation by the single-characteristic slices.
DEFAULT_TAGS = frozenset(
    {
        Tag.ACTIVITY,
        Tag.SERVICE,
        Tag.BROADCAST,
        Tag.LIFECYCLE,
        Tag.NORMAL,
        Tag.BASIC,
        Tag.EXPLICIT_INTENT,
    }
)
CALLBACK_TAGS = frozenset({Tag.DYNAMIC, Tag.IMPLICIT, Tag.STATIC})


def parse_tags(values: Iterable[str | Tag]) -> frozenset[Tag]:
    return frozenset(Tag.parse(v) for v in values)


def sorted_tags(tags: Iterable[Tag]) -> list[Tag]:
    """Order tags as they appear in the taxonomy table."""
    order = {t: i for i, t in enumerate(ALL_TAGS)}
    return sorted(tags, key=order.__getitem__)


@dataclass(frozen=True)
class IccLink:
    """A directed ICC edge.

    Equality and hashing use only the ``(source, target)`` pair, so sets of
    links compare the way the oracle metric does.
    """

    source: str
    target: str
    intent: IntentPayload | None = field(default=None, compare=False)
    exit_kind: ExitKind = field(default=ExitKind.NORMAL, compare=False)
    tags: frozenset[Tag] = field(default=frozenset(), compare=False)

    def __post_init__(self) -> None:
        if not self.source or not self.target:
            raise ValidationError("ICC link endpoints must be non-empty")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.source, self.target)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"source": self.source, "target": self.target}
        if self.tags:
            out["tags"] = [t.value for t in sorted_tags(self.tags)]
        if self.intent is not None:
            out["intent"] = self.intent.to_json()
        if self.exit_kind is not ExitKind.NORMAL:
            out["exit_kind"] = self.exit_kind.value
        return out

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> IccLink:
        if not isinstance(obj, Mapping) or "source" not in obj or "target" not in obj:
            raise ParseError("link must be an object with 'source' and 'target'")
        tags = parse_tags(obj.get("tags", ()))
        intent = obj.get("intent")
        exit_kind = obj.get("exit_kind")
        if exit_kind is None:
            exit_kind = ExitKind.ATYPICAL if Tag.ATYPICAL in tags else ExitKind.NORMAL
        try:
            return cls(
                source=obj["source"],
                target=obj["target"],
                intent=IntentPayload.from_json(intent) if intent is not None else None,
                exit_kind=ExitKind(exit_kind),
                tags=tags,
            )
        except ValidationError as exc:
            raise ParseError(str(exc)) from None


def ordered_links(links: Iterable[IccLink]) -> list[IccLink]:
    """Deduplicate by pair (first occurrence wins) and sort lexicographically."""
    seen: dict[tuple[str, str], IccLink] = {}
    for link in links:
        seen.setdefault(link.pair, link)
    return [seen[p] for p in sorted(seen)]


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str


def validate_tags(tags: Iterable[str | Tag], intent: IntentPayload | None = None) -> list[Violation]:
    """Check a tag set against the six consistency rules.

    ``intent`` is optional; when given, the intent-type tag is cross-checked
    against the payload kind. An empty tag set is trivially consistent.
    """
    tagset = parse_tags(tags)
    if not tagset:
        return []
    found: list[Violation] = []

    intent_types = tagset & set(TAG_CATEGORIES["Intent Type"])
    if len(intent_types) > 1:
        found.append(Violation("DuplicateIntentType", "both ExplicitIntent and ImplicitIntent present"))
    elif not intent_types:
        found.append(Violation("MissingIntentType", "no Intent Type tag"))

    if not tagset & set(TAG_CATEGORIES["Exit Method"]):
        found.append(Violation("MissingExitMethod", "no Exit Method tag"))

    if not tagset & set(TAG_CATEGORIES["Component"]):
        found.append(Violation("MissingComponentTag", "no Component tag"))

    if {Tag.ATYPICAL, Tag.NORMAL} <= tagset:
        found.append(Violation("ConflictingExitMethod", "Atypical excludes Normal"))

    if intent is not None:
        if Tag.IMPLICIT_INTENT in tagset and intent.target_component is not None:
            found.append(
                Violation("ImplicitIntentWithTarget", "ImplicitIntent tag on a payload naming a target")
            )
        if Tag.EXPLICIT_INTENT in tagset and intent.kind is IntentKind.IMPLICIT:
            found.append(Violation("ExplicitIntentWithoutTarget", "ExplicitIntent tag on an implicit payload"))

    if Tag.DYNAMIC_BROADCAST in tagset and Tag.BROADCAST not in tagset:
        found.append(Violation("DynamicBroadcastWithoutBroadcast", "DynamicBroadcast requires Broadcast"))
    return found


def tag_distribution(oracle: Iterable[IccLink]) -> dict[Tag, float]:
    links = list(oracle)
    if not links:
        raise EmptyInput("tag distribution of an empty oracle")
    counts = dict.fromkeys(ALL_TAGS, 0)
    for link in links:
        if not link.tags:
            raise ValidationError(f"untagged oracle link {link.source} -> {link.target}")
        for tag in link.tags:
            counts[tag] += 1
    return {tag: n / len(links) for tag, n in counts.items()}
