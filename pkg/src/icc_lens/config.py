"""TOML configuration shared by the CLI commands.

Example::

    [extractor]
    poly_window = 2
    invalid_lifecycles = ["onStop", "onDestroy"]

    [metrics]
    high_degree_threshold = 15

    [unify]
    collapse_fragments = true

    [unify.tools.alpha]
    strict_noncomponent = true
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .ctg import HIGH_DEGREE_THRESHOLD
from .errors import ParseError, ValidationError
from .evaluate import UnifyOptions
from .extract import ExtractorConfig


@dataclass
class Config:
    extractor: ExtractorConfig = field(default_factory=ExtractorConfig)
    high_degree_threshold: float = HIGH_DEGREE_THRESHOLD
    # None leaves each tool output's own options (or the defaults) in force
    unify: UnifyOptions | None = None
    tool_options: dict[str, UnifyOptions] = field(default_factory=dict)
    emit_restart: bool = False
    callback_rate: float = 0.0


def parse_config(text: str) -> Config:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"config: {exc}") from None
    unknown = set(doc) - {"extractor", "metrics", "unify", "generator"}
    if unknown:
        raise ValidationError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    cfg = Config()
    cfg.extractor = ExtractorConfig.from_mapping(doc.get("extractor", {}))
    metrics = doc.get("metrics", {})
    cfg.high_degree_threshold = float(metrics.get("high_degree_threshold", HIGH_DEGREE_THRESHOLD))
    unify = dict(doc.get("unify", {}))
    tools = unify.pop("tools", {})
    if unify:
        cfg.unify = UnifyOptions.from_mapping(unify)
    # per-tool tables inherit the [unify] defaults
    cfg.tool_options = {name: UnifyOptions.from_mapping({**unify, **raw}) for name, raw in tools.items()}
    gen = doc.get("generator", {})
    cfg.emit_restart = bool(gen.get("emit_restart", False))
    cfg.callback_rate = float(gen.get("callback_rate", 0.0))
    return cfg


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    return parse_config(Path(path).read_text(encoding="utf-8"))
