from __future__ import annotations

from pathlib import Path

import pytest

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _ACCEPTANCE_RESULTS[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid, outcome in sorted(_ACCEPTANCE_RESULTS.items()):
        name = nodeid.split("::", 1)[1]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}: {name}")

from pribom.apk import merge_models, open_apk, parse_dex, parse_resource_table
from pribom.model import (EventBinding, LabelDeclaration, MethodRef,
                          PermissionFinding, PolicySegment, PriBomDocument,
                          TplRecord, WidgetEntry, WidgetIdentifier)

FIXTURES = Path(__file__).parent / "fixtures"

# The worked example from the upstream inventory table: the MenuItem
# widget of a real app, with an obfuscated third-party handler.
TABLE2_HANDLER = ("com.applovin.impl.mediation.debugger.ui.b.a: "
                  "boolean onOptionsItemSelected(android.view.MenuItem)")
TABLE2_METHOD_PATH = ("Landroid/location/LocationManager;-getLastKnownLocation-"
                      "(Ljava/lang/String;)Landroid/location/Location;")
TABLE2_POLICY_TEXT = ("with your permission we may collect your geo-location "
                      "information to optimize user experience, such as for "
                      "localization accuracy...")
TABLE2_PURPOSES = ("App functionality", "Analytics", "Advertising or marketing")


@pytest.fixture(scope="session")
def fixture_apk_path() -> Path:
    return FIXTURES / "fixture.apk"


@pytest.fixture(scope="session")
def fixture_archive(fixture_apk_path):
    return open_apk(str(fixture_apk_path))


@pytest.fixture(scope="session")
def fixture_table(fixture_archive):
    return parse_resource_table(fixture_archive.read("resources.arsc"))


@pytest.fixture(scope="session")
def fixture_dex(fixture_archive):
    return merge_models([parse_dex(fixture_archive.read(name))
                         for name in fixture_archive.dex_members()])


def table2_entry() -> WidgetEntry:
    return WidgetEntry(
        identifier=WidgetIdentifier(
            widget_type="android.view.MenuItem",
            widget_id=2131296311,
            widget_name="action_share",
            widget_src=()),
        bindings=(EventBinding(event="item_selected",
                               handler=MethodRef.parse(TABLE2_HANDLER),
                               origin="framework_callback"),),
        findings=(PermissionFinding(
            permission="android.permission.ACCESS_COARSE_LOCATION",
            data_type="Location",
            method_path=TABLE2_METHOD_PATH,
            min_api_level=1),),
        widget_min_api=1,
        tpls=(TplRecord(name="javax.inject", version="1",
                        latest_version="1.0.0.redhat-00012",
                        publish_date_current="2009-10-13",
                        publish_date_latest="2024-04-16",
                        confidence=1.0),),
        policy_segments=(PolicySegment(
            data_type="Location", text=TABLE2_POLICY_TEXT,
            paragraph_index=0, sentence_index=0,
            evidence=("keyword:geo-location",)),),
        label_declarations=(LabelDeclaration(
            label_name="Approximate Location", data_type="Location",
            optional_flag=True, purposes=TABLE2_PURPOSES),),
    )


def table2_document() -> PriBomDocument:
    return PriBomDocument(
        app_package="com.lepsworld.two",
        app_version_name="5.3",
        app_version_code=53,
        generated_at="2024-01-01T00:00:00Z",
        entries=(table2_entry(),),
    )


@pytest.fixture
def table2_doc() -> PriBomDocument:
    return table2_document()
