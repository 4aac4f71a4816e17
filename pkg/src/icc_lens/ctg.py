"""Component transition graphs and the number/graph metrics computed on them."""

from __future__ import annotations

import json
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import EmptyGraph, ParseError
from .manifest import AppModel, classify
from .model import BASIC_KINDS, ComponentKind, IccLink

HIGH_DEGREE_THRESHOLD = 15


@dataclass(frozen=True)
class Ctg:
    nodes: dict[str, ComponentKind]
    declared: frozenset[str]
    edges: tuple[tuple[str, str], ...]
    default_entry: str | None = None
    exported: frozenset[str] = frozenset()

    @property
    def extra_nodes(self) -> list[str]:
        """Edge endpoints that are not declared components."""
        return sorted(set(self.nodes) - self.declared)

    def successors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for s, t in self.edges:
            adj[s].append(t)
        return adj


def build_ctg(model: AppModel, links: Iterable[IccLink | tuple[str, str]], fragments: Iterable[str] | None = None) -> Ctg:
    registry = model.fragments if fragments is None else frozenset(fragments)
    nodes = {name: comp.kind for name, comp in model.components.items()}
    pairs = set()
    for link in links:
        s, t = link.pair if isinstance(link, IccLink) else link
        pairs.add((s, t))
        for end in (s, t):
            if end not in nodes:
                nodes[end] = classify(end, model, registry)
    return Ctg(
        nodes=dict(sorted(nodes.items())),
        declared=frozenset(model.components),
        edges=tuple(sorted(pairs)),
        default_entry=model.default_entry,
        exported=frozenset(model.exported),
    )


def degree(ctg: Ctg) -> Fraction:
    """Average degree ``2|E| / |N|`` with |N| the number of declared components."""
    if not ctg.declared:
        raise EmptyGraph("graph has no declared components")
    return Fraction(2 * len(ctg.edges), len(ctg.declared))


def is_high_degree(value: Fraction | float, threshold: float = HIGH_DEGREE_THRESHOLD) -> bool:
    return value > threshold


def _reachable(adj: dict[str, list[str]], sources: Iterable[str]) -> set[str]:
    seen = set(sources)
    queue = deque(seen)
    while queue:
        node = queue.popleft()
        for nxt in adj.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


@dataclass(frozen=True)
class Connectivity:
    separated: list[str]
    main_not: list[str] | None  # None when the model has no default entry
    export_not: list[str]

    @property
    def c_separated(self) -> int:
        return len(self.separated)

    @property
    def c_main_not(self) -> int | None:
        return None if self.main_not is None else len(self.main_not)

    @property
    def c_export_not(self) -> int:
        return len(self.export_not)

    def to_json(self) -> dict[str, Any]:
        return {
            "c_separated": self.c_separated,
            "c_main_not": self.c_main_not,
            "c_export_not": self.c_export_not,
            "separated": self.separated,
            "main_not": self.main_not,
            "export_not": self.export_not,
        }


def connectivity(ctg: Ctg, model: AppModel | None = None) -> Connectivity:
    """Isolated, entry-unreachable and export-unreachable declared components.

    Entry and exported sets come from ``model`` when given, else from the
    graph itself. Every source counts as reachable from itself.
    """
    entry = ctg.default_entry if model is None else model.default_entry
    exported = ctg.exported if model is None else frozenset(model.exported)
    touched = {n for edge in ctg.edges for n in edge}
    declared = sorted(ctg.declared)
    separated = [n for n in declared if n not in touched]
    adj = ctg.successors()
    main_not = None
    if entry is not None:
        from_main = _reachable(adj, [entry])
        main_not = [n for n in declared if n not in from_main]
    from_exported = _reachable(adj, exported)
    export_not = [n for n in declared if n not in from_exported]
    return Connectivity(separated, main_not, export_not)


@dataclass(frozen=True)
class EdgeClasses:
    c_c: int
    a_a: int
    cf_cf: int

    def to_json(self) -> dict[str, int]:
        return {"c_c": self.c_c, "a_a": self.a_a, "cf_cf": self.cf_cf}


def edge_classes(ctg: Ctg) -> EdgeClasses:
    cf_kinds = BASIC_KINDS | {ComponentKind.FRAGMENT}
    c_c = a_a = cf_cf = 0
    for s, t in ctg.edges:
        ks, kt = ctg.nodes[s], ctg.nodes[t]
        if ks in BASIC_KINDS and kt in BASIC_KINDS:
            c_c += 1
        if ks is ComponentKind.ACTIVITY and kt is ComponentKind.ACTIVITY:
            a_a += 1
        if ks in cf_kinds and kt in cf_kinds:
            cf_cf += 1
    return EdgeClasses(c_c, a_a, cf_cf)


def graph_metrics(ctg: Ctg, threshold: float = HIGH_DEGREE_THRESHOLD) -> dict[str, Any]:
    """The full metric bundle as a JSON-ready dict."""
    deg = degree(ctg)
    conn = connectivity(ctg)
    flags = []
    if is_high_degree(deg, threshold):
        flags.append("high_degree")
    if conn.main_not is None:
        flags.append("no_default_entry")
    if ctg.extra_nodes:
        flags.append("undeclared_endpoints")
    return {
        "nodes": len(ctg.declared),
        "edges": len(ctg.edges),
        "degree": float(deg),
        **conn.to_json(),
        "edge_classes": edge_classes(ctg).to_json(),
        "undeclared_endpoints": ctg.extra_nodes,
        "flags": flags,
    }


# -- import / export ----------------------------------------------------------


def edges_to_text(ctg: Ctg) -> str:
    return "".join(f"{s}\t{t}\n" for s, t in ctg.edges)


def edges_from_text(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) != 2 or not all(p.strip() for p in parts):
            raise ParseError("expected 'source<TAB>target'", lineno)
        pairs.append((parts[0].strip(), parts[1].strip()))
    return pairs


def ctg_to_json(ctg: Ctg) -> dict[str, Any]:
    return {
        "nodes": [
            {"name": n, "kind": k.value, "declared": n in ctg.declared} for n, k in ctg.nodes.items()
        ],
        "edges": [list(e) for e in ctg.edges],
        "default_entry": ctg.default_entry,
        "exported": sorted(ctg.exported),
    }


def ctg_from_json(doc: dict[str, Any]) -> Ctg:
    try:
        nodes = {n["name"]: ComponentKind(n["kind"]) for n in doc["nodes"]}
        declared = frozenset(n["name"] for n in doc["nodes"] if n.get("declared", True))
        edges = tuple(sorted({(s, t) for s, t in doc["edges"]}))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed graph document: {exc}") from None
    for s, t in edges:
        if s not in nodes or t not in nodes:
            raise ParseError(f"edge {s} -> {t} references an unknown node")
    return Ctg(nodes, declared, edges, doc.get("default_entry"), frozenset(doc.get("exported", ())))


def load_links(text: str) -> list[IccLink]:
    """Read links from an oracle/links JSON document or a tab-separated edge list."""
    stripped = text.strip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        if isinstance(doc, dict):
            if "nodes" in doc and "edges" in doc:
                return [IccLink(s, t) for s, t in ctg_from_json(doc).edges]
            doc = doc.get("links", [])
        return [IccLink.from_json(obj) for obj in doc]
    return [IccLink(s, t) for s, t in edges_from_text(text)]
