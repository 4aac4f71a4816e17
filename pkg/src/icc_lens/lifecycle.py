"""Component lifecycle EFSMs: a trace validator and a scripted trace generator.

Launch mode is assumed to be ``standard`` throughout. The single-component
transition table lives in ``TRANSITIONS``; the multi-component rules
(launch, back, rotate) are layered on top in :func:`validate_trace`.
"""

from __future__ import annotations

import enum
import json
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import InvalidScript, ParseError, UnknownComponent
from .manifest import AppModel, classify
from .model import ComponentKind, LifecycleMethod
from .trace import EventKind, TraceEvent


class LifecycleState(str, enum.Enum):
    S0_INIT = "notStored"
    S1_CREATED = "created"
    S2_STARTED = "started"
    S3_RESUMED = "resumed"
    S4_PAUSED = "paused"
    S6_STOPPED = "stopped"
    S7_DESTROYED = "destroyed"


S = LifecycleState
M = LifecycleMethod

TRANSITIONS: dict[tuple[LifecycleState, LifecycleMethod], LifecycleState] = {
    (S.S0_INIT, M.ON_CREATE): S.S1_CREATED,
    (S.S1_CREATED, M.ON_START): S.S2_STARTED,
    (S.S2_STARTED, M.ON_RESUME): S.S3_RESUMED,
    (S.S3_RESUMED, M.ON_PAUSE): S.S4_PAUSED,
    (S.S4_PAUSED, M.ON_RESUME): S.S3_RESUMED,
    (S.S4_PAUSED, M.ON_STOP): S.S6_STOPPED,
    (S.S6_STOPPED, M.ON_RESTART): S.S2_STARTED,
    (S.S6_STOPPED, M.ON_DESTROY): S.S7_DESTROYED,
}


@dataclass(frozen=True)
class LifecycleViolation:
    state: LifecycleState
    method: LifecycleMethod
    index: int | None = None
    component: str | None = None
    reason: str = ""

    def __str__(self) -> str:
        where = f"event {self.index}: " if self.index is not None else ""
        who = f"{self.component}." if self.component else ""
        text = f"{where}{who}{self.method.value} not allowed in state {self.state.name}"
        return f"{text} ({self.reason})" if self.reason else text


def step(state: LifecycleState, method: LifecycleMethod) -> LifecycleState | LifecycleViolation:
    nxt = TRANSITIONS.get((state, method))
    if nxt is None:
        return LifecycleViolation(state, method)
    return nxt


def validate_trace(trace: Iterable[TraceEvent], model: AppModel | None = None) -> list[LifecycleViolation]:
    """Run one EFSM per activity plus the stack-level interaction rules.

    With a model, only events of registered activities are checked; without
    one, every lifecycle event is. Returns at most one violation per event
    index; an empty list means the trace is admissible.
    """
    states: dict[str, LifecycleState] = {}
    stack: list[str] = []  # bottom -> top
    found: list[LifecycleViolation] = []

    def resumed_other(comp: str) -> str | None:
        for name, st in states.items():
            if name != comp and st is S.S3_RESUMED:
                return name
        return None

    for index, event in enumerate(trace):
        method = event.lifecycle
        if method is None:
            continue
        comp = event.component
        if model is not None and classify(comp, model) is not ComponentKind.ACTIVITY:
            continue
        state = states.get(comp, S.S0_INIT)
        if state is S.S7_DESTROYED and method is M.ON_CREATE:
            state = S.S0_INIT  # a fresh instance of a finished component

        def bad(reason: str) -> None:
            found.append(LifecycleViolation(state, method, index, comp, reason))

        if method is M.ON_CREATE and (other := resumed_other(comp)):
            bad(f"launched while {other} is still resumed")
            continue
        if method is M.ON_RESUME:
            if other := resumed_other(comp):
                bad(f"resumed while {other} is still resumed")
                continue
            if state is S.S6_STOPPED:
                # back navigation: the finishing top has paused, the one below resumes
                if len(stack) >= 2 and stack[-2] == comp and states.get(stack[-1]) is S.S4_PAUSED:
                    states[comp] = S.S3_RESUMED
                    continue
                bad("stopped component resumed without back navigation")
                continue

        result = step(state, method)
        if isinstance(result, LifecycleViolation):
            reason = "stop before pause" if (state, method) == (S.S3_RESUMED, M.ON_STOP) else "no such transition"
            bad(reason)
            continue
        states[comp] = result
        if method is M.ON_CREATE:
            if comp in stack:
                stack.remove(comp)
            stack.append(comp)
        elif method is M.ON_DESTROY and comp in stack:
            stack.remove(comp)
    return found


# -- generator ----------------------------------------------------------------


@dataclass(frozen=True)
class UiAction:
    kind: str  # "launch" | "back" | "rotate"
    component: str | None = None

    @classmethod
    def launch(cls, component: str) -> UiAction:
        return cls("launch", component)

    @classmethod
    def back(cls) -> UiAction:
        return cls("back")

    @classmethod
    def rotate(cls) -> UiAction:
        return cls("rotate")

    def to_json(self) -> dict:
        if self.kind == "launch":
            return {"launch": self.component}
        return {self.kind: True}


def parse_script(text: str) -> list[UiAction]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, list):
        raise ParseError("script must be a JSON list of actions")
    actions = []
    for i, item in enumerate(doc):
        if isinstance(item, dict) and isinstance(item.get("launch"), str) and len(item) == 1:
            actions.append(UiAction.launch(item["launch"]))
        elif item == {"back": True}:
            actions.append(UiAction.back())
        elif item == {"rotate": True}:
            actions.append(UiAction.rotate())
        else:
            raise ParseError(f"action {i}: unrecognised {item!r}")
    return actions


def generate_trace(
    model: AppModel,
    script: Sequence[UiAction],
    seed: int = 0,
    *,
    emit_restart: bool = False,
    callback_rate: float = 0.0,
    callbacks: Sequence[str] = ("onClick",),
) -> list[TraceEvent]:
    """Emit the lifecycle events a standard-mode device would log for ``script``.

    ``callback_rate`` > 0 sprinkles callback events on the resumed top
    component after each action, drawn from a ``random.Random(seed)``; with
    the default of 0 the seed has no effect. ``emit_restart`` makes back
    navigation emit ``onRestart`` before the revealed component resumes.
    """
    rng = random.Random(seed)
    events: list[TraceEvent] = []
    stack: list[str] = []

    def emit(comp: str, method: LifecycleMethod) -> None:
        events.append(TraceEvent(len(events), comp, comp, method.value, EventKind.LIFECYCLE))

    for i, action in enumerate(script):
        if i == 0 and (action.kind != "launch" or action.component != model.default_entry):
            raise InvalidScript(f"script must start by launching the default entry {model.default_entry!r}")
        if action.kind == "launch":
            target = action.component
            if target not in model.components:
                raise UnknownComponent(target)
            if model.components[target].kind is not ComponentKind.ACTIVITY:
                raise InvalidScript(f"action {i}: {target} is not an activity")
            if target in stack:
                raise InvalidScript(f"action {i}: {target} is already on the back stack")
            prev = stack[-1] if stack else None
            if prev:
                emit(prev, M.ON_PAUSE)
            emit(target, M.ON_CREATE)
            emit(target, M.ON_START)
            emit(target, M.ON_RESUME)
            if prev:
                emit(prev, M.ON_STOP)
            stack.append(target)
        elif action.kind == "back":
            if not stack:
                raise InvalidScript(f"action {i}: back with an empty stack")
            top = stack.pop()
            emit(top, M.ON_PAUSE)
            if stack:
                if emit_restart:
                    emit(stack[-1], M.ON_RESTART)
                emit(stack[-1], M.ON_RESUME)
            emit(top, M.ON_STOP)
            emit(top, M.ON_DESTROY)
        elif action.kind == "rotate":
            if not stack:
                raise InvalidScript(f"action {i}: rotate with an empty stack")
            top = stack[-1]
            for method in (M.ON_PAUSE, M.ON_STOP, M.ON_DESTROY, M.ON_CREATE, M.ON_START, M.ON_RESUME):
                emit(top, method)
        else:
            raise InvalidScript(f"action {i}: unknown kind {action.kind!r}")

        if stack and callback_rate > 0 and rng.random() < callback_rate:
            events.append(TraceEvent(len(events), stack[-1], stack[-1], rng.choice(callbacks), EventKind.CALLBACK))
    return events
