"""Manifest summaries (plain XML or JSON) and the class-hierarchy sidecar."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

from .errors import AmbiguousDefaultEntry, CyclicHierarchy, NoDefaultEntry, ParseError, ValidationError
from .model import Component, ComponentKind, DataSpec, IntentFilter, IntentPayload

ANDROID_NS = "http://schemas.android.com/apk/res/android"
ACTION_MAIN = "android.intent.action.MAIN"
CATEGORY_LAUNCHER = "android.intent.category.LAUNCHER"

_XML_KINDS = {
    "activity": ComponentKind.ACTIVITY,
    "service": ComponentKind.SERVICE,
    "receiver": ComponentKind.RECEIVER,
    "provider": ComponentKind.PROVIDER,
}
_KIND_NAMES = {v: k for k, v in _XML_KINDS.items()}


@dataclass(frozen=True)
class AppModel:
    package: str
    components: Mapping[str, Component]
    hierarchy: Mapping[str, str] = field(default_factory=dict)
    default_entry: str | None = None
    fragments: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        for name, comp in self.components.items():
            if name != comp.name:
                raise ValidationError(f"component key {name!r} does not match its name {comp.name!r}")
        if self.default_entry is not None and self.default_entry not in self.components:
            raise NoDefaultEntry(f"default entry {self.default_entry!r} is not a registered component")
        _check_acyclic(self.hierarchy)

    @property
    def exported(self) -> list[str]:
        return sorted(n for n, c in self.components.items() if c.exported)


def _check_acyclic(hierarchy: Mapping[str, str]) -> None:
    done: set[str] = set()
    for start in hierarchy:
        path: list[str] = []
        on_path: set[str] = set()
        node = start
        while node in hierarchy and node not in done:
            if node in on_path:
                i = path.index(node)
                raise CyclicHierarchy(path[i:] + [node])
            path.append(node)
            on_path.add(node)
            node = hierarchy[node]
        done.update(path)


def ancestors(cls: str, model: AppModel | Mapping[str, str]) -> list[str]:
    """Superclass chain of ``cls``, nearest first. Unknown classes have none."""
    hierarchy = model.hierarchy if isinstance(model, AppModel) else model
    chain = []
    node = cls
    while node in hierarchy:
        node = hierarchy[node]
        chain.append(node)
    return chain


def classify(name: str, model: AppModel, fragments: Iterable[str] | None = None) -> ComponentKind:
    comp = model.components.get(name)
    if comp is not None:
        return comp.kind
    registry = model.fragments if fragments is None else fragments
    if name in registry:
        return ComponentKind.FRAGMENT
    return ComponentKind.NON_COMPONENT


def _is_launcher(f: IntentFilter) -> bool:
    return ACTION_MAIN in f.actions and CATEGORY_LAUNCHER in f.categories


def _build_model(
    package: str,
    components: list[Component],
    hierarchy: Mapping[str, str],
    fragments: Iterable[str],
    entry: str | None,
    require_entry: bool,
) -> AppModel:
    by_name: dict[str, Component] = {}
    for comp in components:
        if comp.name in by_name:
            raise ValidationError(f"duplicate component {comp.name!r}")
        by_name[comp.name] = comp
    if entry is None:
        launchers = [c.name for c in components if c.main_entry]
        if len(launchers) > 1:
            raise AmbiguousDefaultEntry(launchers)
        if launchers:
            entry = launchers[0]
        elif require_entry:
            raise NoDefaultEntry("no component declares a MAIN/LAUNCHER intent-filter")
    elif entry not in by_name:
        raise NoDefaultEntry(f"entry override {entry!r} is not a registered component")
    return AppModel(
        package=package,
        components=dict(sorted(by_name.items())),
        hierarchy=dict(hierarchy),
        default_entry=entry,
        fragments=frozenset(fragments),
    )


def _make_component(name: str, kind: ComponentKind, exported: bool | None, filters: list[IntentFilter]) -> Component:
    if exported is None:
        exported = bool(filters)
    main = exported and any(_is_launcher(f) for f in filters)
    return Component(name=name, kind=kind, exported=exported, main_entry=main, filters=tuple(filters))


# -- JSON ---------------------------------------------------------------------


def _parse_json_model(text: str, hierarchy, fragments, entry, require_entry) -> AppModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or "package" not in doc:
        raise ParseError("manifest JSON must be an object with a 'package' key")
    comps = []
    try:
        for raw in doc.get("components", []):
            try:
                kind = _XML_KINDS[raw["kind"]]
            except KeyError:
                raise ParseError(f"component needs 'name' and a kind in {sorted(_XML_KINDS)}: {raw!r}") from None
            filters = [IntentFilter.from_json(f) for f in raw.get("filters", [])]
            comps.append(_make_component(raw["name"], kind, raw.get("exported"), filters))
    except ValidationError as exc:
        raise ParseError(str(exc)) from None
    merged_hierarchy = dict(doc.get("hierarchy", {}))
    merged_hierarchy.update(hierarchy or {})
    frags = set(doc.get("fragments", [])) | set(fragments or ())
    return _build_model(
        doc["package"],
        comps,
        merged_hierarchy,
        frags,
        entry if entry is not None else doc.get("default_entry"),
        require_entry,
    )


def serialize_model(model: AppModel) -> str:
    doc: dict[str, Any] = {"package": model.package}
    if model.default_entry is not None:
        doc["default_entry"] = model.default_entry
    doc["components"] = [
        {
            "name": c.name,
            "kind": _KIND_NAMES[c.kind],
            "exported": c.exported,
            "filters": [f.to_json() for f in c.filters],
        }
        for c in model.components.values()
    ]
    doc["hierarchy"] = dict(sorted(model.hierarchy.items()))
    doc["fragments"] = sorted(model.fragments)
    return json.dumps(doc, indent=2) + "\n"


# -- XML ----------------------------------------------------------------------


def _attr(elem: ET.Element, name: str) -> str | None:
    value = elem.get(f"{{{ANDROID_NS}}}{name}")
    if value is None:
        value = elem.get(name)
    return value


def _qualify(name: str, package: str) -> str:
    if name.startswith("."):
        return package + name
    if "." not in name and package:
        return f"{package}.{name}"
    return name


def _parse_filter(elem: ET.Element) -> IntentFilter:
    actions, categories, data = set(), set(), []
    for child in elem:
        tag = child.tag
        if tag == "action":
            actions.add(_attr(child, "name") or "")
        elif tag == "category":
            categories.add(_attr(child, "name") or "")
        elif tag == "data":
            path = _attr(child, "path") or _attr(child, "pathPrefix")
            spec = DataSpec(
                scheme=_attr(child, "scheme"),
                host=_attr(child, "host"),
                path=path,
                mime_type=_attr(child, "mimeType"),
            )
            if not spec.is_empty:
                data.append(spec)
    actions.discard("")
    categories.discard("")
    return IntentFilter(frozenset(actions), frozenset(categories), tuple(data))


def _parse_bool(value: str | None) -> bool | None:
    if value is None:
        return None
    if value.lower() in ("true", "false"):
        return value.lower() == "true"
    raise ValidationError(f"expected true/false, got {value!r}")


def _xml_root(text: str) -> ET.Element:
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError(str(exc).split(":")[0], line, col) from None


def _parse_xml_model(text: str, hierarchy, fragments, entry, require_entry) -> AppModel:
    root = _xml_root(text)
    if root.tag != "manifest":
        raise ParseError(f"root element must be <manifest>, got <{root.tag}>")
    package = root.get("package") or ""
    comps = []
    try:
        for app in root.iter("application"):
            for elem in app:
                kind = _XML_KINDS.get(elem.tag)
                if kind is None:
                    continue
                raw_name = _attr(elem, "name")
                if not raw_name:
                    raise ValidationError(f"<{elem.tag}> without android:name")
                filters = [_parse_filter(f) for f in elem.iter("intent-filter")]
                exported = _parse_bool(_attr(elem, "exported"))
                comps.append(_make_component(_qualify(raw_name, package), kind, exported, filters))
    except ValidationError as exc:
        raise ParseError(str(exc)) from None
    return _build_model(package, comps, hierarchy or {}, fragments or (), entry, require_entry)


def parse_intent_xml(text: str) -> IntentPayload:
    """Parse a standalone ``<intent>`` element (as found in preference XML).

    The android namespace prefix may be used without being declared.
    """
    if "xmlns:android" not in text:
        text = f'<wrap xmlns:android="{ANDROID_NS}">{text}</wrap>'
        root = _xml_root(text)
        elem = root.find("intent")
    else:
        elem = _xml_root(text)
        if elem.tag != "intent":
            elem = elem.find(".//intent")
    if elem is None:
        raise ParseError("no <intent> element found")
    target = _attr(elem, "targetClass")
    package = _attr(elem, "targetPackage") or ""
    categories = frozenset(_attr(c, "name") or "" for c in elem.iter("category")) - {""}
    if target:
        return IntentPayload.explicit(_qualify(target, package), action=_attr(elem, "action"), categories=categories)
    return IntentPayload.implicit(_attr(elem, "action"), categories)


# -- entry point --------------------------------------------------------------


def parse_manifest(
    data: bytes | str,
    fmt: str = "xml",
    *,
    hierarchy: Mapping[str, str] | None = None,
    fragments: Iterable[str] | None = None,
    entry: str | None = None,
    require_entry: bool = True,
) -> AppModel:
    """Parse a manifest summary into an :class:`AppModel`.

    ``fmt`` is ``"xml"`` or ``"json"``. ``hierarchy`` and ``fragments`` are the
    sidecar maps; for JSON they are merged with any embedded in the document.
    ``entry`` overrides launcher detection. With ``require_entry=False`` a
    manifest without a launcher yields ``default_entry=None`` instead of
    raising :class:`NoDefaultEntry`.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    if fmt == "json":
        return _parse_json_model(data, hierarchy, fragments, entry, require_entry)
    if fmt == "xml":
        return _parse_xml_model(data, hierarchy, fragments, entry, require_entry)
    raise ValueError(f"unknown manifest format {fmt!r}")


def guess_format(path: str) -> str:
    return "json" if path.lower().endswith(".json") else "xml"


def parse_hierarchy(text: str) -> dict[str, str]:
    """Read a hierarchy sidecar: JSON ``{class: superclass}`` or ``class<TAB>super`` lines."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        result = {str(k): str(v) for k, v in doc.items()}
    else:
        result = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) != 2:
                raise ParseError("expected 'class<TAB>superclass'", lineno)
            result[parts[0].strip()] = parts[1].strip()
    _check_acyclic(result)
    return result


def parse_fragment_registry(text: str) -> frozenset[str]:
    """Fragment registry: a JSON list or one class name per line."""
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            return frozenset(json.loads(stripped))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")
    )
