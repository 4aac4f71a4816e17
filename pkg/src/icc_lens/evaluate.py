"""Unified evaluation of ICC resolution tool outputs against a tagged oracle."""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, fields
from typing import Any

from .ctg import HIGH_DEGREE_THRESHOLD, build_ctg, graph_metrics
from .errors import EmptyInput, EmptyOracle, IccLensError, NotInOracle, ParseError, ValidationError
from .manifest import AppModel, classify
from .matching import PartialRecord, complete_partial
from .model import (
    ALL_TAGS,
    CALLBACK_TAGS,
    DEFAULT_TAGS,
    TAG_CATEGORIES,
    ComponentKind,
    IccLink,
    Tag,
    ordered_links,
    tag_distribution,
)

_FRAGMENT = ComponentKind.FRAGMENT
_NON = ComponentKind.NON_COMPONENT


@dataclass(frozen=True)
class UnifyOptions:
    filter_noncomponent: bool = True  # drop edges whose endpoints are both non-components
    strict_noncomponent: bool = False  # drop edges with any non-component endpoint
    collapse_fragments: bool = True
    drop_fragment_edges: bool = False

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any] | None) -> UnifyOptions:
        raw = dict(raw or {})
        names = {f.name for f in fields(cls)}
        unknown = set(raw) - names
        if unknown:
            raise ValidationError(f"unknown unify option(s): {', '.join(sorted(unknown))}")
        return cls(**{k: bool(v) for k, v in raw.items()})


@dataclass
class ToolOutput:
    tool: str
    flavor: str  # "edges" | "partial"
    links: list[IccLink] = field(default_factory=list)
    records: list[PartialRecord] = field(default_factory=list)
    success: bool = True
    options: UnifyOptions | None = None

    def __post_init__(self) -> None:
        if self.flavor not in ("edges", "partial"):
            raise ValidationError(f"{self.tool}: flavor must be 'edges' or 'partial'")
        if self.flavor == "edges" and self.records:
            raise ValidationError(f"{self.tool}: edge output carries partial records")
        if self.flavor == "partial" and self.links:
            raise ValidationError(f"{self.tool}: partial output carries links")

    @property
    def reported(self) -> int:
        return len(self.links) if self.flavor == "edges" else len(self.records)

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> ToolOutput:
        if not isinstance(doc, Mapping) or not doc.get("tool"):
            raise ParseError("tool output must be an object with a 'tool' name")
        flavor = doc.get("flavor", "edges")
        try:
            return cls(
                tool=doc["tool"],
                flavor=flavor,
                links=[IccLink.from_json(obj) for obj in doc.get("links", [])],
                records=[PartialRecord.from_json(obj) for obj in doc.get("records", [])],
                success=bool(doc.get("success", True)),
                options=UnifyOptions.from_mapping(doc["options"]) if "options" in doc else None,
            )
        except ValidationError as exc:
            raise ParseError(str(exc)) from None


def parse_tool_output(text: str) -> ToolOutput:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return ToolOutput.from_json(doc)


def parse_oracle(text: str) -> tuple[str | None, list[IccLink]]:
    """Oracle JSON ``{"app": ..., "links": [...]}``; returns ``(app, links)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("links"), list):
        raise ParseError("oracle must be an object with a 'links' list")
    return doc.get("app"), [IccLink.from_json(obj) for obj in doc["links"]]


# -- unification --------------------------------------------------------------


def _filter_noncomponent(links, kinds, opts: UnifyOptions):
    if opts.strict_noncomponent:
        return [l for l in links if kinds(l.source) is not _NON and kinds(l.target) is not _NON]
    if opts.filter_noncomponent:
        return [l for l in links if not (kinds(l.source) is _NON and kinds(l.target) is _NON)]
    return list(links)


def collapse_fragments(links: Sequence[IccLink], kinds) -> list[IccLink]:
    """Add ``u -> v`` for every path ``u -> F1 -> ... -> Fk -> v`` through fragments.

    ``u`` and ``v`` are non-fragment nodes; self loops are not added. Existing
    links are all kept.
    """
    out = list(links)
    have = {l.pair for l in links}
    adj: dict[str, list[str]] = {}
    for l in links:
        adj.setdefault(l.source, []).append(l.target)
    for u in sorted(adj):
        if kinds(u) is _FRAGMENT:
            continue
        seen: set[str] = set()
        frontier = [t for t in adj[u] if kinds(t) is _FRAGMENT]
        while frontier:
            frag = frontier.pop()
            if frag in seen:
                continue
            seen.add(frag)
            for v in adj.get(frag, ()):
                if kinds(v) is _FRAGMENT:
                    frontier.append(v)
                elif v != u and (u, v) not in have:
                    have.add((u, v))
                    out.append(IccLink(u, v))
    return out


@dataclass
class Unified:
    links: list[IccLink]
    unresolved: list[PartialRecord] = field(default_factory=list)
    unregistered: list[IccLink] = field(default_factory=list)


def unify_detailed(output: ToolOutput, model: AppModel, options: UnifyOptions | None = None) -> Unified:
    opts = options or output.options or UnifyOptions()
    cache: dict[str, ComponentKind] = {}

    def kinds(name: str) -> ComponentKind:
        if name not in cache:
            cache[name] = classify(name, model)
        return cache[name]

    result = Unified(links=list(output.links))
    if output.flavor == "partial":
        completion = complete_partial(output.records, model)
        result.links = completion.links
        result.unresolved = completion.unresolved
        result.unregistered = completion.unregistered

    links = _filter_noncomponent(result.links, kinds, opts)
    if opts.collapse_fragments:
        links = _filter_noncomponent(collapse_fragments(links, kinds), kinds, opts)
    if opts.drop_fragment_edges:
        links = [l for l in links if kinds(l.source) is not _FRAGMENT and kinds(l.target) is not _FRAGMENT]
    result.links = ordered_links(links)
    return result


def unify(output: ToolOutput, model: AppModel, options: UnifyOptions | None = None) -> list[IccLink]:
    """Normalise one tool's output into a sorted, deduplicated link list."""
    return unify_detailed(output, model, options).links


# -- oracle metrics -----------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    tp: list[IccLink]
    fp: list[IccLink]
    fn: list[IccLink]

    @property
    def fn_rate(self) -> float:
        total = len(self.tp) + len(self.fn)
        return len(self.fn) / total if total else 0.0


def compare(unified: Iterable[IccLink], oracle: Iterable[IccLink]) -> Comparison:
    """Split by ``(source, target)``. TP and FN carry the oracle's link objects."""
    reported = {l.pair: l for l in ordered_links(unified)}
    truth = {l.pair: l for l in ordered_links(oracle)}
    return Comparison(
        tp=[truth[p] for p in sorted(reported.keys() & truth.keys())],
        fp=[reported[p] for p in sorted(reported.keys() - truth.keys())],
        fn=[truth[p] for p in sorted(truth.keys() - reported.keys())],
    )


@dataclass(frozen=True)
class Pairwise:
    reported_ratio_a: float
    reported_ratio_b: float
    tp_ratio_a: float | None
    tp_ratio_b: float | None


def pairwise(a: Iterable[IccLink], b: Iterable[IccLink], oracle: Iterable[IccLink], *, strict: bool = True) -> Pairwise:
    """Overlap of two tools: share of the union each reported, and oracle recall.

    With an empty oracle the TP ratios raise :class:`EmptyOracle`, or are
    ``None`` when ``strict`` is false.
    """
    pa = {l.pair for l in a}
    pb = {l.pair for l in b}
    po = {l.pair for l in oracle}
    union = pa | pb
    ra = len(pa) / len(union) if union else 0.0
    rb = len(pb) / len(union) if union else 0.0
    if not po:
        if strict:
            raise EmptyOracle("TP ratios need a non-empty oracle")
        return Pairwise(ra, rb, None, None)
    return Pairwise(ra, rb, len(pa & po) / len(po), len(pb & po) / len(po))


def fn_by_tag(fn_set: Iterable[IccLink], oracle: Iterable[IccLink]) -> dict[Tag, int]:
    truth = {l.pair: l for l in oracle}
    counts = dict.fromkeys(ALL_TAGS, 0)
    for link in fn_set:
        if link.pair not in truth:
            raise NotInOracle(f"{link.source} -> {link.target} is not in the oracle")
        for tag in truth[link.pair].tags:
            counts[tag] += 1
    return counts


_COMPONENT_TYPE_TAGS = frozenset(TAG_CATEGORIES["Component"]) | frozenset(TAG_CATEGORIES["Non-Component"])


def in_single_slice(tags: frozenset[Tag], tag: Tag) -> bool:
    """Whether a link tagged ``tags`` isolates characteristic ``tag``.

    Callback entry tags must be the link's only characteristic. Other tags
    ignore callback tags in the exclusivity test, and ``Atypical`` also
    ignores component-type tags. Default tags (plain Activity, Lifecycle,
    ExplicitIntent, ...) select links with no characteristic beyond callbacks.
    """
    if tag not in tags:
        return False
    characteristics = tags - DEFAULT_TAGS
    if tag in CALLBACK_TAGS:
        return characteristics == {tag}
    rest = characteristics - CALLBACK_TAGS
    if tag is Tag.ATYPICAL:
        rest = rest - _COMPONENT_TYPE_TAGS
    if tag in DEFAULT_TAGS:
        return not rest
    return rest == {tag}


def single_characteristic_slice(oracle: Iterable[IccLink], tag: Tag | str) -> list[IccLink]:
    tag = Tag.parse(tag)
    return [l for l in oracle if in_single_slice(l.tags, tag)]


# -- reports ------------------------------------------------------------------


def _r(x: float | None) -> float | None:
    return None if x is None else round(x, 6)


def _pairs(links: Iterable[IccLink]) -> list[list[str]]:
    return [[l.source, l.target] for l in links]


@dataclass
class ToolResult:
    tool: str
    success: bool
    error: str | None = None
    reported: int = 0
    unified: list[IccLink] = field(default_factory=list)
    comparison: Comparison | None = None
    metrics: dict[str, Any] | None = None
    fn_tags: dict[Tag, int] | None = None
    unresolved: list[PartialRecord] = field(default_factory=list)
    unregistered: list[IccLink] = field(default_factory=list)
    payload_diffs: list[dict[str, Any]] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"tool": self.tool, "success": self.success}
        if self.error:
            out["error"] = self.error
        if not self.success:
            return out
        cmp = self.comparison
        out.update(
            reported=self.reported,
            unified=len(self.unified),
            tp=len(cmp.tp),
            fp=len(cmp.fp),
            fn=len(cmp.fn),
            fn_rate=_r(cmp.fn_rate),
            tp_links=_pairs(cmp.tp),
            fp_links=_pairs(cmp.fp),
            fn_links=_pairs(cmp.fn),
            fn_by_tag={t.value: n for t, n in self.fn_tags.items()} if self.fn_tags is not None else None,
            metrics=self.metrics,
            unresolved_records=[r.to_json() for r in self.unresolved],
            unregistered_targets=_pairs(self.unregistered),
            payload_diffs=self.payload_diffs,
        )
        return out


@dataclass
class AppReport:
    app: str
    package: str
    oracle: list[IccLink]
    tools: list[ToolResult]
    pairwise: list[dict[str, Any]]
    slices: dict[str, Any]

    @property
    def failures(self) -> list[str]:
        return [t.tool for t in self.tools if not t.success]

    def to_json(self) -> dict[str, Any]:
        try:
            dist = {t.value: _r(v) for t, v in tag_distribution(self.oracle).items()}
        except (EmptyInput, ValidationError):
            dist = None
        return {
            "app": self.app,
            "package": self.package,
            "oracle": {"count": len(self.oracle), "tag_distribution": dist},
            "tools": [t.to_json() for t in self.tools],
            "failures": self.failures,
            "pairwise": self.pairwise,
            "single_characteristic": self.slices,
        }


def _evaluate_tool(output, model, oracle, options, threshold) -> ToolResult:
    if not output.success:
        return ToolResult(output.tool, False, error="analysis failed")
    try:
        unified = unify_detailed(output, model, options)
        cmp = compare(unified.links, oracle)
        try:
            metrics = graph_metrics(build_ctg(model, unified.links), threshold)
        except IccLensError as exc:
            metrics = {"error": str(exc)}
        tagged = all(l.tags for l in oracle)
        diffs = []
        reported = {l.pair: l for l in unified.links}
        for link in cmp.tp:
            mine = reported[link.pair].intent
            if mine is not None and link.intent is not None and mine != link.intent:
                diffs.append(
                    {"source": link.source, "target": link.target, "tool": mine.to_json(), "oracle": link.intent.to_json()}
                )
        return ToolResult(
            tool=output.tool,
            success=True,
            reported=output.reported,
            unified=unified.links,
            comparison=cmp,
            metrics=metrics,
            fn_tags=fn_by_tag(cmp.fn, oracle) if tagged else None,
            unresolved=unified.unresolved,
            unregistered=unified.unregistered,
            payload_diffs=diffs,
        )
    except IccLensError as exc:
        return ToolResult(output.tool, False, error=str(exc))


def build_report(
    model: AppModel,
    oracle: Iterable[IccLink],
    outputs: Sequence[ToolOutput],
    options: UnifyOptions | None = None,
    *,
    app: str | None = None,
    tool_options: Mapping[str, UnifyOptions] | None = None,
    threshold: float = HIGH_DEGREE_THRESHOLD,
) -> AppReport:
    """Evaluate every tool on one app. A failing tool never aborts the others."""
    oracle = ordered_links(oracle)
    tool_options = tool_options or {}
    results = [
        _evaluate_tool(out, model, oracle, tool_options.get(out.tool, options), threshold)
        for out in sorted(outputs, key=lambda o: o.tool)
    ]
    ok = [r for r in results if r.success]

    pw = []
    for i, ra in enumerate(ok):
        for rb in ok[i + 1 :]:
            p = pairwise(ra.unified, rb.unified, oracle, strict=False)
            pw.append(
                {
                    "a": ra.tool,
                    "b": rb.tool,
                    "reported_ratio_a": _r(p.reported_ratio_a),
                    "reported_ratio_b": _r(p.reported_ratio_b),
                    "tp_ratio_a": _r(p.tp_ratio_a),
                    "tp_ratio_b": _r(p.tp_ratio_b),
                }
            )

    slices: dict[str, Any] = {}
    if oracle and all(l.tags for l in oracle):
        for tag in ALL_TAGS:
            members = {l.pair for l in single_characteristic_slice(oracle, tag)}
            if not members:
                continue
            per_tool = {}
            for r in ok:
                tp = sum(1 for l in r.comparison.tp if l.pair in members)
                per_tool[r.tool] = {"tp": tp, "fn": len(members) - tp}
            slices[tag.value] = {"oracle": len(members), "tools": per_tool}

    return AppReport(
        app=app or model.package,
        package=model.package,
        oracle=oracle,
        tools=results,
        pairwise=pw,
        slices=slices,
    )


@dataclass
class EvalReport:
    apps: list[AppReport]

    def summary(self) -> dict[str, Any]:
        tools = sorted({t.tool for a in self.apps for t in a.tools})
        per_tool = {}
        for name in tools:
            fp = fn = analysed = 0
            failed = []
            for a in self.apps:
                for t in a.tools:
                    if t.tool != name:
                        continue
                    if t.success:
                        analysed += 1
                        fp += len(t.comparison.fp)
                        fn += len(t.comparison.fn)
                    else:
                        failed.append(a.app)
            per_tool[name] = {"apps_analysed": analysed, "failed_apps": failed, "fp": fp, "fn": fn}
        return {"oracle": sum(len(a.oracle) for a in self.apps), "tools": per_tool}

    def to_json(self) -> dict[str, Any]:
        return {"apps": [a.to_json() for a in self.apps], "summary": self.summary()}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        """FP/FN table: one row per app, one column per tool, plus a Sum row."""
        tools = sorted({t.tool for a in self.apps for t in a.tools})
        header = ["Bench", "#OR"] + tools
        rows = []
        for a in self.apps:
            cells = {t.tool: t for t in a.tools}
            row = [a.app, str(len(a.oracle))]
            for name in tools:
                t = cells.get(name)
                if t is None or not t.success:
                    row.append("-")
                else:
                    row.append(f"{len(t.comparison.fp)}/{len(t.comparison.fn)}")
            rows.append(row)
        summary = self.summary()
        rows.append(
            ["Sum", str(summary["oracle"])]
            + [f"{summary['tools'][n]['fp']}/{summary['tools'][n]['fn']}" for n in tools]
        )
        widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]

        def fmt(row):
            return " | ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))

        rule = "-+-".join("-" * w for w in widths)
        lines = ["#FP / #FN per tool", fmt(header), rule] + [fmt(r) for r in rows[:-1]] + [rule, fmt(rows[-1])]
        return "\n".join(lines) + "\n"


@dataclass
class AppCase:
    app: str
    model: AppModel
    oracle: list[IccLink]
    outputs: list[ToolOutput]


def build_suite_report(
    cases: Sequence[AppCase],
    options: UnifyOptions | None = None,
    *,
    tool_options: Mapping[str, UnifyOptions] | None = None,
    threshold: float = HIGH_DEGREE_THRESHOLD,
) -> EvalReport:
    return EvalReport(
        [
            build_report(c.model, c.oracle, c.outputs, options, app=c.app, tool_options=tool_options, threshold=threshold)
            for c in sorted(cases, key=lambda c: c.app)
        ]
    )
