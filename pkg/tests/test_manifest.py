import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icc_lens.errors import AmbiguousDefaultEntry, CyclicHierarchy, NoDefaultEntry, ParseError
from icc_lens.manifest import (
    ACTION_MAIN,
    CATEGORY_LAUNCHER,
    AppModel,
    ancestors,
    classify,
    parse_fragment_registry,
    parse_hierarchy,
    parse_intent_xml,
    parse_manifest,
    serialize_model,
)
from icc_lens.model import Component, ComponentKind, DataSpec, IntentFilter, IntentKind

from builders import activities

NS = 'xmlns:android="http://schemas.android.com/apk/res/android"'
LAUNCH_FILTER = (
    "<intent-filter><action android:name='android.intent.action.MAIN'/>"
    "<category android:name='android.intent.category.LAUNCHER'/></intent-filter>"
)


def xml(body, package="com.pkg"):
    return f'<manifest {NS} package="{package}"><application>{body}</application></manifest>'


def test_single_launcher_activity():
    m = parse_manifest(xml(f'<activity android:name=".Main">{LAUNCH_FILTER}</activity>'))
    assert m.default_entry == "com.pkg.Main"
    main = m.components["com.pkg.Main"]
    assert main.exported and main.main_entry and main.kind is ComponentKind.ACTIVITY


def test_activity_and_unfiltered_service():
    m = parse_manifest(xml(f'<activity android:name="A">{LAUNCH_FILTER}</activity><service android:name=".S"/>'))
    assert set(m.components) == {"com.pkg.A", "com.pkg.S"}
    assert m.components["com.pkg.A"].exported
    s = m.components["com.pkg.S"]
    assert s.kind is ComponentKind.SERVICE and not s.exported and s.filters == ()
    assert m.default_entry == "com.pkg.A"


def test_preference_intent_target_is_explicit():
    snippet = '<intent android:targetPackage="com.pkg" android:targetClass="com.pkg.Tgt"/>'
    intent = parse_intent_xml(snippet)
    assert intent.kind is IntentKind.EXPLICIT
    assert intent.target_component == "com.pkg.Tgt"


def test_fixture_manifest(fixtures):
    m = parse_manifest((fixtures / "apps" / "two_receivers.xml").read_bytes(), "xml")
    assert m.default_entry == "com.pkg.MainActivity"
    r1 = m.components["com.pkg.Receiver1"]
    assert r1.kind is ComponentKind.RECEIVER and not r1.exported
    assert r1.filters[0].actions == {"FilterA"}


def test_data_elements():
    body = (
        '<activity android:name=".V"><intent-filter><action android:name="VIEW"/>'
        '<data android:scheme="https" android:host="x.org" android:pathPrefix="/a"/>'
        '<data android:mimeType="image/*"/></intent-filter></activity>'
        f'<activity android:name=".M">{LAUNCH_FILTER}</activity>'
    )
    m = parse_manifest(xml(body))
    specs = m.components["com.pkg.V"].filters[0].data_specs
    assert specs == (DataSpec("https", "x.org", "/a"), DataSpec(mime_type="image/*"))


def test_host_without_scheme_rejected():
    body = '<activity android:name=".V"><intent-filter><action android:name="X"/><data android:host="x.org"/></intent-filter></activity>'
    with pytest.raises(ParseError, match="without a scheme"):
        parse_manifest(xml(body))


def test_malformed_xml_reports_position():
    with pytest.raises(ParseError) as info:
        parse_manifest(f'<manifest {NS} package="p">\n<application>\n<activity android:name="A">\n</manifest>')
    assert info.value.line == 4


def test_malformed_json_reports_position():
    with pytest.raises(ParseError) as info:
        parse_manifest('{"package": "p",\n "components": [}', "json")
    assert info.value.line == 2


def test_no_launcher():
    with pytest.raises(NoDefaultEntry):
        parse_manifest(xml('<activity android:name=".A"/>'))
    m = parse_manifest(xml('<activity android:name=".A"/>'), require_entry=False)
    assert m.default_entry is None


def test_two_launchers_need_override():
    body = f'<activity android:name=".Splash">{LAUNCH_FILTER}</activity><activity android:name=".Main">{LAUNCH_FILTER}</activity>'
    with pytest.raises(AmbiguousDefaultEntry) as info:
        parse_manifest(xml(body))
    assert info.value.candidates == ["com.pkg.Main", "com.pkg.Splash"]
    assert parse_manifest(xml(body), entry="com.pkg.Splash").default_entry == "com.pkg.Splash"


def test_entry_override_must_exist():
    with pytest.raises(NoDefaultEntry):
        parse_manifest(xml(f'<activity android:name=".A">{LAUNCH_FILTER}</activity>'), entry="com.pkg.Nope")


def test_cyclic_hierarchy():
    with pytest.raises(CyclicHierarchy):
        parse_manifest(xml(f'<activity android:name=".A">{LAUNCH_FILTER}</activity>'), hierarchy={"X": "Y", "Y": "Z", "Z": "X"})
    with pytest.raises(CyclicHierarchy):
        parse_hierarchy('{"A": "A"}')


def test_explicit_exported_overrides_default():
    body = f'<activity android:name=".A">{LAUNCH_FILTER}</activity><activity android:name=".B" android:exported="true"/>'
    m = parse_manifest(xml(body))
    assert m.components["com.pkg.B"].exported
    assert m.exported == ["com.pkg.A", "com.pkg.B"]


def test_ancestors():
    m = activities("A", hierarchy={"A": "B", "B": "C"})
    assert ancestors("A", m) == ["B", "C"]
    assert ancestors("C", m) == []
    assert ancestors("unknown", m) == []


def test_classify():
    m = activities("A", fragments={"F"})
    assert classify("A", m) is ComponentKind.ACTIVITY
    assert classify("Helper", m) is ComponentKind.NON_COMPONENT
    assert classify("F", m) is ComponentKind.FRAGMENT
    assert classify("G", m, fragments={"G"}) is ComponentKind.FRAGMENT


def test_sidecar_formats():
    assert parse_hierarchy("A\tB\n# note\nB\tC\n") == {"A": "B", "B": "C"}
    assert parse_fragment_registry("F1\n\nF2\n") == {"F1", "F2"}
    assert parse_fragment_registry('["F1"]') == {"F1"}


def test_default_entry_stable_across_orderings():
    parts = [
        f'<activity android:name=".Main">{LAUNCH_FILTER}</activity>',
        '<activity android:name=".B"/>',
        '<service android:name=".S"/>',
    ]
    first = parse_manifest(xml("".join(parts)))
    second = parse_manifest(xml("".join(reversed(parts))))
    assert first == second


# -- JSON round trip ----------------------------------------------------------

_words = st.sampled_from(["a", "b", "c", "VIEW", "SEND"])
_data = st.one_of(
    st.builds(DataSpec, mime_type=st.sampled_from(["image/*", "text/plain"])),
    st.builds(DataSpec, scheme=st.sampled_from(["http", "content"]), host=st.none() | st.just("h"), path=st.none() | st.just("/p")),
)
_filters = st.builds(
    IntentFilter,
    actions=st.frozensets(_words, max_size=3),
    categories=st.frozensets(_words, max_size=2),
    data_specs=st.lists(_data, max_size=2).map(tuple),
)


@st.composite
def app_models(draw):
    n = draw(st.integers(1, 6))
    names = [f"com.app.C{i}" for i in range(n)]
    comps = {}
    for i, name in enumerate(names):
        kind = draw(st.sampled_from([ComponentKind.ACTIVITY, ComponentKind.SERVICE, ComponentKind.RECEIVER, ComponentKind.PROVIDER]))
        filters = draw(st.lists(_filters, max_size=2))
        if i == 0:
            filters.append(IntentFilter(frozenset({ACTION_MAIN}), frozenset({CATEGORY_LAUNCHER})))
        exported = True if i == 0 else draw(st.booleans())
        main = exported and any(ACTION_MAIN in f.actions and CATEGORY_LAUNCHER in f.categories for f in filters)
        comps[name] = Component(name, kind, exported, main, tuple(filters))
    classes = names + ["com.app.Base", "com.app.Root"]
    hierarchy = {}
    for i in range(1, len(classes)):
        if draw(st.booleans()):
            hierarchy[classes[i]] = classes[draw(st.integers(0, i - 1))]
    fragments = draw(st.frozensets(st.sampled_from(["com.app.F1", "com.app.F2"])))
    entry = draw(st.sampled_from(names))
    return AppModel("com.app", comps, hierarchy, entry, fragments)


@settings(max_examples=150)
@given(app_models())
def test_json_round_trip(model):
    text = serialize_model(model)
    assert parse_manifest(text, "json") == model
    assert json.loads(text)["package"] == "com.app"
