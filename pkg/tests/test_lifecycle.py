import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icc_lens.errors import InvalidScript, ParseError, UnknownComponent
from icc_lens.lifecycle import (
    LifecycleState,
    LifecycleViolation,
    UiAction,
    generate_trace,
    parse_script,
    step,
    validate_trace,
)
from icc_lens.model import ComponentKind, LifecycleMethod
from icc_lens.trace import make_trace

from builders import activities, activity, component, model, random_script

S = LifecycleState
M = LifecycleMethod


def names(trace):
    return [(e.component, e.method) for e in trace]


def test_step_table_examples():
    assert step(S.S0_INIT, M.ON_CREATE) is S.S1_CREATED
    assert step(S.S1_CREATED, M.ON_START) is S.S2_STARTED
    bad = step(S.S0_INIT, M.ON_RESUME)
    assert isinstance(bad, LifecycleViolation)
    assert (bad.state, bad.method) == (S.S0_INIT, M.ON_RESUME)


@pytest.mark.parametrize(
    "state, method, expected",
    [
        (S.S2_STARTED, M.ON_RESUME, S.S3_RESUMED),
        (S.S3_RESUMED, M.ON_PAUSE, S.S4_PAUSED),
        (S.S4_PAUSED, M.ON_RESUME, S.S3_RESUMED),
        (S.S4_PAUSED, M.ON_STOP, S.S6_STOPPED),
        (S.S6_STOPPED, M.ON_RESTART, S.S2_STARTED),
        (S.S6_STOPPED, M.ON_DESTROY, S.S7_DESTROYED),
    ],
)
def test_step_remaining_edges(state, method, expected):
    assert step(state, method) is expected


def test_step_table_has_exactly_eight_edges():
    edges = [(s, m) for s in S for m in M if not isinstance(step(s, m), LifecycleViolation)]
    assert len(edges) == 8
    assert not any(s is S.S7_DESTROYED for s, _ in edges)


def test_canonical_launch_is_admissible():
    trace = make_trace([("A", "onCreate"), ("A", "onStart"), ("A", "onResume")])
    assert validate_trace(trace) == []


def test_stop_before_pause():
    trace = make_trace([("A", "onCreate"), ("A", "onStart"), ("A", "onResume"), ("A", "onStop"), ("A", "onPause")])
    found = validate_trace(trace)
    assert len(found) == 1
    assert found[0].index == 3 and found[0].method is M.ON_STOP and found[0].state is S.S3_RESUMED


def test_two_component_launch_is_admissible():
    trace = make_trace(
        [("A", "onCreate"), ("A", "onStart"), ("A", "onResume"), ("A", "onPause"),
         ("B", "onCreate"), ("B", "onStart"), ("B", "onResume"), ("A", "onStop")]
    )
    assert validate_trace(trace) == []


def test_launch_without_pausing_previous_top():
    trace = make_trace([("A", "onCreate"), ("A", "onStart"), ("A", "onResume"), ("B", "onCreate")])
    found = validate_trace(trace)
    assert [v.index for v in found] == [3]
    assert "A" in found[0].reason


def test_stopped_component_cannot_resume_out_of_order():
    trace = make_trace(
        [("A", "onCreate"), ("A", "onStart"), ("A", "onResume"), ("A", "onPause"),
         ("B", "onCreate"), ("B", "onStart"), ("B", "onResume"), ("A", "onStop"), ("A", "onResume")]
    )
    assert [v.index for v in validate_trace(trace)] == [8]


def test_non_lifecycle_events_are_skipped():
    trace = make_trace([("A", "onClick"), ("A", "onCreate"), ("A", "onWhatever")])
    assert validate_trace(trace) == []


def test_model_restricts_checks_to_activities():
    m = model(activity("A", main=True), component("S", ComponentKind.SERVICE))
    trace = make_trace([("S", "onCreate"), ("S", "onDestroy")])
    assert validate_trace(trace, m) == []
    assert len(validate_trace(trace)) == 1


# -- generator ----------------------------------------------------------------


def test_generate_single_launch():
    m = activities("A", "B")
    assert names(generate_trace(m, [UiAction.launch("A")], 0)) == [("A", "onCreate"), ("A", "onStart"), ("A", "onResume")]


def test_generate_two_launches():
    m = activities("A", "B")
    trace = generate_trace(m, [UiAction.launch("A"), UiAction.launch("B")], 0)
    assert names(trace) == [
        ("A", "onCreate"), ("A", "onStart"), ("A", "onResume"), ("A", "onPause"),
        ("B", "onCreate"), ("B", "onStart"), ("B", "onResume"), ("A", "onStop"),
    ]


def test_generate_back():
    m = activities("A", "B")
    trace = generate_trace(m, [UiAction.launch("A"), UiAction.launch("B"), UiAction.back()], 0)
    assert names(trace)[-4:] == [("B", "onPause"), ("A", "onResume"), ("B", "onStop"), ("B", "onDestroy")]
    assert validate_trace(trace, m) == []


def test_generate_rotate():
    m = activities("A")
    trace = generate_trace(m, [UiAction.launch("A"), UiAction.rotate()], 0)
    assert [e.method for e in trace[3:]] == ["onPause", "onStop", "onDestroy", "onCreate", "onStart", "onResume"]
    assert validate_trace(trace, m) == []


def test_generate_with_restart():
    m = activities("A", "B")
    trace = generate_trace(m, [UiAction.launch("A"), UiAction.launch("B"), UiAction.back()], 0, emit_restart=True)
    assert ("A", "onRestart") in names(trace)
    assert validate_trace(trace, m) == []


def test_back_to_empty_then_relaunch():
    m = activities("A", "B")
    script = [UiAction.launch("A"), UiAction.back(), UiAction.launch("B")]
    assert validate_trace(generate_trace(m, script, 0), m) == []


def test_generator_errors():
    m = model(activity("A", main=True), activity("B"), component("S", ComponentKind.SERVICE))
    with pytest.raises(UnknownComponent):
        generate_trace(m, [UiAction.launch("A"), UiAction.launch("Nope")], 0)
    with pytest.raises(InvalidScript):
        generate_trace(m, [UiAction.launch("B")], 0)
    with pytest.raises(InvalidScript):
        generate_trace(m, [UiAction.launch("A"), UiAction.launch("S")], 0)
    with pytest.raises(InvalidScript):
        generate_trace(m, [UiAction.launch("A"), UiAction.launch("A")], 0)
    with pytest.raises(InvalidScript):
        generate_trace(m, [UiAction.launch("A"), UiAction.back(), UiAction.back()], 0)


def test_seed_determinism_with_callbacks():
    m = activities("A", "B", "C")
    script = random_script(random.Random(7), ["A", "B", "C"], 15)
    one = generate_trace(m, script, 42, callback_rate=0.5)
    two = generate_trace(m, script, 42, callback_rate=0.5)
    assert one == two
    assert any(e.kind.value == "callback" for e in one)
    assert validate_trace(one, m) == []


def test_parse_script(fixtures):
    script = parse_script((fixtures / "apps" / "two_step.script.json").read_text())
    assert script == [UiAction.launch("com.pkg.A"), UiAction.launch("com.pkg.B"), UiAction.back(), UiAction.rotate()]
    assert [a.to_json() for a in script][2] == {"back": True}
    with pytest.raises(ParseError):
        parse_script('[{"jump": 1}]')


@settings(max_examples=200)
@given(st.integers(1, 6), st.integers(0, 20), st.randoms(use_true_random=False), st.booleans())
def test_generated_traces_are_admissible(n, length, rnd, restart):
    comp_names = [f"A{i}" for i in range(n)]
    m = activities(*comp_names)
    script = random_script(rnd, comp_names, length)
    assert validate_trace(generate_trace(m, script, 0, emit_restart=restart), m) == []
