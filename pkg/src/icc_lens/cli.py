"""icc-lens command line.

Exit codes: 0 ok, 1 parse error, 2 semantic/validation error, 3 the trace
is not admissible (``validate`` only).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import Config, load_config
from .ctg import build_ctg, graph_metrics, load_links
from .errors import IccLensError, ParseError
from .evaluate import AppCase, ToolOutput, build_suite_report, parse_oracle, parse_tool_output
from .extract import extract_iccs
from .lifecycle import generate_trace, parse_script, validate_trace
from .manifest import AppModel, guess_format, parse_fragment_registry, parse_hierarchy, parse_manifest
from .matching import complete_partial, parse_records
from .model import tag_distribution, validate_tags
from .trace import format_trace, parse_trace

log = logging.getLogger("icc_lens")


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _load_model(path, args, *, require_entry=True, hierarchy=None, fragments=None) -> AppModel:
    hierarchy = hierarchy or getattr(args, "hierarchy", None)
    fragments = fragments or getattr(args, "fragment_registry", None)
    try:
        return parse_manifest(
            _read(path),
            guess_format(str(path)),
            hierarchy=parse_hierarchy(_read(hierarchy)) if hierarchy else None,
            fragments=parse_fragment_registry(_read(fragments)) if fragments else None,
            entry=getattr(args, "entry", None),
            require_entry=require_entry,
        )
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _config(args) -> Config:
    cfg = load_config(args.config)
    ext = cfg.extractor
    if getattr(args, "poly_window", None) is not None:
        ext = replace(ext, poly_window=args.poly_window)
    if getattr(args, "stack_limit", None) is not None:
        ext = replace(ext, stack_limit=args.stack_limit)
    cfg.extractor = ext
    if getattr(args, "threshold", None) is not None:
        cfg.high_degree_threshold = args.threshold
    return cfg


def cmd_extract(args) -> int:
    cfg = _config(args)
    model = _load_model(args.manifest, args)
    trace = parse_trace(_read(args.trace))
    links = extract_iccs(trace, model, cfg.extractor)
    log.info("extracted %d links from %d events", len(links), len(trace))
    if args.format == "text":
        _emit("".join(f"{l.source}\t{l.target}\n" for l in links), args.out)
    else:
        _emit(_dump({"app": model.package, "links": [l.to_json() for l in links]}), args.out)
    return 0


def cmd_validate(args) -> int:
    model = _load_model(args.manifest, args, require_entry=False)
    trace = parse_trace(_read(args.trace))
    violations = validate_trace(trace, model)
    if args.format == "json":
        doc = {
            "admissible": not violations,
            "violations": [
                {"index": v.index, "component": v.component, "state": v.state.name, "method": v.method.value, "reason": v.reason}
                for v in violations
            ],
        }
        _emit(_dump(doc), args.out)
    else:
        lines = [f"{len(violations)} violations"] + [str(v) for v in violations]
        _emit("\n".join(lines) + "\n", args.out)
    return 3 if violations else 0


def cmd_metrics(args) -> int:
    cfg = _config(args)
    model = _load_model(args.manifest, args, require_entry=False)
    links = load_links(_read(args.links))
    metrics = graph_metrics(build_ctg(model, links), cfg.high_degree_threshold)
    if args.format == "text":
        lines = [f"{k}: {metrics[k]}" for k in ("nodes", "edges", "degree", "c_separated", "c_main_not", "c_export_not")]
        lines.append("edge_classes: " + " ".join(f"{k}={v}" for k, v in metrics["edge_classes"].items()))
        lines.append("flags: " + (", ".join(metrics["flags"]) or "none"))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_dump(metrics), args.out)
    return 0


def cmd_match(args) -> int:
    model = _load_model(args.manifest, args, require_entry=False)
    completion = complete_partial(parse_records(_read(args.records)), model)
    doc = {
        "app": model.package,
        "links": [l.to_json() for l in completion.links],
        "unresolved": [r.to_json() for r in completion.unresolved],
        "unregistered": [[l.source, l.target] for l in completion.unregistered],
    }
    _emit(_dump(doc), args.out)
    return 0


def _load_tool(path: str) -> ToolOutput:
    try:
        return parse_tool_output(_read(path))
    except ParseError as exc:
        log.warning("tool output %s unusable, marking failed: %s", path, exc)
        return ToolOutput(tool=Path(path).stem, flavor="edges", success=False)


def _suite_cases(path: str, args) -> list[AppCase]:
    base = Path(path).parent
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None
    cases = []
    for entry in doc.get("apps", []):
        model = _load_model(
            base / entry["manifest"],
            args,
            require_entry=False,
            hierarchy=base / entry["hierarchy"] if "hierarchy" in entry else None,
            fragments=base / entry["fragments"] if "fragments" in entry else None,
        )
        app, oracle = parse_oracle(_read(base / entry["oracle"]))
        outputs = [_load_tool(str(base / t)) for t in entry.get("tools", [])]
        cases.append(AppCase(entry.get("app") or app or model.package, model, oracle, outputs))
    return cases


def cmd_compare(args) -> int:
    cfg = _config(args)
    if args.suite:
        cases = _suite_cases(args.suite, args)
    else:
        if not args.manifest or not args.oracle:
            raise ParseError("compare needs MANIFEST ORACLE [TOOL ...] or --suite")
        model = _load_model(args.manifest, args, require_entry=False)
        app, oracle = parse_oracle(_read(args.oracle))
        outputs = [_load_tool(p) for p in args.tools]
        cases = [AppCase(app or model.package, model, oracle, outputs)]
    report = build_suite_report(
        cases, cfg.unify, tool_options=cfg.tool_options, threshold=cfg.high_degree_threshold
    )
    _emit(report.to_text() if args.format == "text" else report.dumps(), args.out)
    return 0


def cmd_gen(args) -> int:
    cfg = _config(args)
    model = _load_model(args.manifest, args)
    script = parse_script(_read(args.script))
    trace = generate_trace(
        model, script, args.seed, emit_restart=cfg.emit_restart, callback_rate=cfg.callback_rate
    )
    _emit(format_trace(trace), args.out)
    return 0


def cmd_tags(args) -> int:
    _, oracle = parse_oracle(_read(args.oracle))
    problems = []
    for link in oracle:
        for v in validate_tags(link.tags, link.intent):
            problems.append({"source": link.source, "target": link.target, "rule": v.rule, "message": v.message})
    doc = {
        "links": len(oracle),
        "violations": problems,
        "distribution": {t.value: round(f, 6) for t, f in tag_distribution(oracle).items()} if oracle else {},
    }
    _emit(_dump(doc), args.out)
    return 2 if problems else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="icc-lens", description="ICC link extraction and resolution-tool evaluation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, manifest=True):
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")
        p.add_argument("--config", metavar="PATH", help="TOML configuration file")
        if manifest:
            p.add_argument("--hierarchy", metavar="PATH", help="class hierarchy sidecar")
            p.add_argument("--fragment-registry", metavar="PATH", help="fragment class list")
            p.add_argument("--entry", metavar="NAME", help="override the default entry component")

    p = sub.add_parser("extract", help="extract ICC links from an execution trace")
    p.add_argument("trace")
    p.add_argument("manifest")
    p.add_argument("--poly-window", type=int)
    p.add_argument("--stack-limit", type=int)
    common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("validate", help="check a trace against the lifecycle EFSMs")
    p.add_argument("trace")
    p.add_argument("manifest")
    common(p)
    p.set_defaults(func=cmd_validate, format="text")

    p = sub.add_parser("metrics", help="degree and connectivity metrics of a link set")
    p.add_argument("manifest")
    p.add_argument("links")
    p.add_argument("--threshold", type=float, help="high-degree flag threshold")
    common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("match", help="resolve partial tool records to target components")
    p.add_argument("manifest")
    p.add_argument("records")
    common(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("compare", help="score tool outputs against an oracle")
    p.add_argument("manifest", nargs="?")
    p.add_argument("oracle", nargs="?")
    p.add_argument("tools", nargs="*")
    p.add_argument("--suite", metavar="PATH", help="JSON file listing several apps")
    p.add_argument("--threshold", type=float, help="high-degree flag threshold")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen", help="generate a lifecycle trace from a UI script")
    p.add_argument("manifest")
    p.add_argument("script")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("tags", help="check oracle tag consistency and print the tag distribution")
    p.add_argument("oracle")
    common(p, manifest=False)
    p.set_defaults(func=cmd_tags)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except IccLensError as exc:
        print(f"icc-lens {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
