"""Extract ICC links from Android execution traces and score ICC resolution tools."""

from .ctg import Ctg, build_ctg, connectivity, degree, edge_classes, graph_metrics
from .errors import IccLensError, ParseError, ValidationError
from .evaluate import (
    EvalReport,
    ToolOutput,
    UnifyOptions,
    build_report,
    build_suite_report,
    compare,
    fn_by_tag,
    pairwise,
    single_characteristic_slice,
    unify,
)
from .extract import ExtractorConfig, extract_iccs, is_valid_event, remove_poly_calls
from .lifecycle import LifecycleState, UiAction, generate_trace, step, validate_trace
from .manifest import AppModel, ancestors, classify, parse_manifest, serialize_model
from .matching import PartialRecord, complete_partial, match_filter, resolve
from .model import (
    Component,
    ComponentKind,
    DataSpec,
    IccLink,
    IntentFilter,
    IntentKind,
    IntentPayload,
    LifecycleMethod,
    Tag,
    tag_distribution,
    validate_tags,
)
from .trace import EventKind, TraceEvent, parse_trace

__version__ = "0.1.0"

__all__ = [
    "ancestors",
    "AppModel",
    "build_ctg",
    "build_report",
    "build_suite_report",
    "classify",
    "compare",
    "complete_partial",
    "Component",
    "ComponentKind",
    "connectivity",
    "Ctg",
    "DataSpec",
    "degree",
    "edge_classes",
    "EvalReport",
    "EventKind",
    "extract_iccs",
    "ExtractorConfig",
    "fn_by_tag",
    "generate_trace",
    "graph_metrics",
    "IccLensError",
    "IccLink",
    "IntentFilter",
    "IntentKind",
    "IntentPayload",
    "is_valid_event",
    "LifecycleMethod",
    "LifecycleState",
    "match_filter",
    "pairwise",
    "parse_manifest",
    "parse_trace",
    "ParseError",
    "PartialRecord",
    "remove_poly_calls",
    "resolve",
    "serialize_model",
    "single_characteristic_slice",
    "step",
    "Tag",
    "tag_distribution",
    "ToolOutput",
    "TraceEvent",
    "UiAction",
    "unify",
    "UnifyOptions",
    "validate_tags",
    "validate_trace",
    "ValidationError",
]

