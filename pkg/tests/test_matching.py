import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icc_lens.errors import ParseError, WrongIntentKind
from icc_lens.manifest import parse_manifest
from icc_lens.matching import PartialRecord, complete_partial, match_filter, parse_records, resolve
from icc_lens.model import ComponentKind, DataSpec, IntentFilter, IntentPayload

from builders import activity, component, model, random_filter, random_filter_model, random_intent
from oracles import brute_force_resolve


def flt(actions=(), categories=(), data=()):
    return IntentFilter(frozenset(actions), frozenset(categories), tuple(data))


def test_receivers_match_by_action_only(fixtures):
    m = parse_manifest((fixtures / "apps" / "two_receivers.xml").read_bytes())
    assert resolve(IntentPayload.implicit("FilterA"), m) == {"com.pkg.Receiver1"}
    assert resolve(IntentPayload.implicit("FilterB"), m) == {"com.pkg.Receiver2"}
    assert resolve(IntentPayload.implicit("FilterC"), m) == frozenset()


def test_category_subset():
    f = flt({"VIEW"}, {"DEFAULT", "BROWSABLE"})
    assert match_filter(IntentPayload.implicit("VIEW", {"DEFAULT"}), f)
    assert match_filter(IntentPayload.implicit("VIEW"), f)
    assert not match_filter(IntentPayload.implicit("VIEW", {"DEFAULT", "ALT"}), f)


def test_action_required():
    assert not match_filter(IntentPayload.implicit(None), flt({"VIEW"}))
    assert not match_filter(IntentPayload.implicit("EDIT"), flt({"VIEW"}))
    assert not match_filter(IntentPayload.implicit("VIEW"), flt())


def test_explicit_intent_rejected_by_filter_matching():
    with pytest.raises(WrongIntentKind):
        match_filter(IntentPayload.explicit("com.pkg.X"), flt({"VIEW"}))


def test_explicit_resolves_to_target_even_if_unregistered():
    m = model(activity("A", main=True))
    assert resolve(IntentPayload.explicit("Nope"), m) == {"Nope"}


@pytest.mark.parametrize(
    "spec, data, expected",
    [
        (DataSpec("http"), DataSpec("http", "a.org", "/x"), True),
        (DataSpec("http"), DataSpec("https"), False),
        (DataSpec("http", "a.org"), DataSpec("http", "b.org"), False),
        (DataSpec("http", "a.org", "/x"), DataSpec("http", "a.org", "/x/y"), True),
        (DataSpec("http", "a.org", "/x/y"), DataSpec("http", "a.org", "/x"), False),
        (DataSpec("http", path="/x"), DataSpec("http"), False),
        (DataSpec(mime_type="image/*"), DataSpec(mime_type="image/png"), True),
        (DataSpec(mime_type="image/*"), DataSpec(mime_type="text/plain"), False),
        (DataSpec(mime_type="*/*"), DataSpec(mime_type="text/plain"), True),
        (DataSpec(mime_type="text/plain"), DataSpec(mime_type="text/plain"), True),
        (DataSpec(mime_type="text/plain"), DataSpec("http"), False),
    ],
)
def test_data_test(spec, data, expected):
    assert match_filter(IntentPayload.implicit("V", data=data), flt({"V"}, data=[spec])) is expected


def test_intent_without_data():
    assert match_filter(IntentPayload.implicit("V"), flt({"V"}))
    assert not match_filter(IntentPayload.implicit("V"), flt({"V"}, data=[DataSpec("http")]))
    # data on the intent but none on the filter
    assert not match_filter(IntentPayload.implicit("V", data=DataSpec("http")), flt({"V"}))


def test_any_data_spec_may_match():
    f = flt({"V"}, data=[DataSpec("http"), DataSpec(mime_type="image/*")])
    assert match_filter(IntentPayload.implicit("V", data=DataSpec(mime_type="image/png")), f)


@settings(max_examples=300)
@given(st.integers(0, 10**6))
def test_resolve_matches_brute_force(seed):
    rng = random.Random(seed)
    m = random_filter_model(rng)
    for _ in range(5):
        intent = random_intent(rng)
        assert resolve(intent, m) == brute_force_resolve(intent, m.components.values())


@settings(max_examples=200)
@given(st.integers(0, 10**6))
def test_adding_filters_never_shrinks_result(seed):
    rng = random.Random(seed)
    m = random_filter_model(rng)
    intent = random_intent(rng)
    before = resolve(intent, m)
    comps = list(m.components.values())
    target = rng.choice(comps[1:] or comps)
    grown = component(target.name, target.kind, *target.filters, random_filter(rng), exported=target.exported)
    if target.main_entry:
        grown = activity(target.name, *target.filters[1:], random_filter(rng), main=True)
    m2 = model(*[grown if c.name == target.name else c for c in comps])
    assert before <= resolve(intent, m2)


def test_complete_partial(fixtures):
    m = parse_manifest((fixtures / "apps" / "two_receivers.xml").read_bytes())
    records = parse_records((fixtures / "apps" / "two_receivers.records.json").read_text())
    done = complete_partial(records, m)
    assert [l.pair for l in done.links] == [
        ("com.pkg.MainActivity", "com.pkg.Receiver1"),
        ("com.pkg.MainActivity", "com.pkg.Tgt"),
    ]
    assert [l.pair for l in done.unregistered] == [("com.pkg.MainActivity", "com.pkg.Tgt")]
    assert [r.intent.action for r in done.unresolved] == ["Nothing"]
    assert done.links[0].intent.action == "FilterA"


def test_complete_partial_fans_out_and_dedups():
    f = flt({"SHARE"})
    m = model(activity("A", main=True), component("R1", ComponentKind.RECEIVER, f), component("R2", ComponentKind.SERVICE, f))
    rec = PartialRecord("A", IntentPayload.implicit("SHARE"))
    done = complete_partial([rec, rec], m)
    assert [l.pair for l in done.links] == [("A", "R1"), ("A", "R2")]


def test_record_round_trip_and_errors():
    rec = PartialRecord("A", IntentPayload.implicit("V", {"DEFAULT"}, data=DataSpec("http", "a.org")))
    assert PartialRecord.from_json(rec.to_json()) == rec
    with pytest.raises(ParseError):
        parse_records('[{"intent": {}}]')
    with pytest.raises(ParseError):
        parse_records("[")
