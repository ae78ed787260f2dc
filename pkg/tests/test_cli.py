import json

import pytest

from conftest import FIXTURES
from pribom import model
from pribom.cli import main


@pytest.fixture(autouse=True)
def fixed_timestamp(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1704067200")


@pytest.fixture()
def golden_path(tmp_path):
    path = tmp_path / "pribom.json"
    path.write_bytes((FIXTURES / "golden_pribom.json").read_bytes())
    return path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_generate_writes_document_and_sidecar(tmp_path, capsys):
    out = tmp_path / "pribom.json"
    code, stdout, _ = run(
        capsys, "generate", "--apk", str(FIXTURES / "fixture.apk"),
        "--policy", str(FIXTURES / "policy.txt"),
        "--label", str(FIXTURES / "data_safety.json"),
        "--out", str(out), "--csv", str(tmp_path / "pribom.csv"))
    assert code == 0
    assert out.read_bytes() == (FIXTURES / "golden_pribom.json").read_bytes()
    assert (tmp_path / "pribom.csv").exists()
    assert (tmp_path / "pribom.diagnostics.json").exists()
    assert "2 widget entries" in stdout


def test_generate_without_apk_is_usage_error(capsys):
    code, _, stderr = run(capsys, "generate")
    assert code == 2
    assert "--apk is required" in stderr


def test_generate_with_bad_apk_reports_module(tmp_path, capsys):
    bad = tmp_path / "bad.apk"
    bad.write_bytes(b"not an archive")
    code, _, stderr = run(capsys, "generate", "--apk", str(bad))
    assert code == 1
    assert "[apk-parser]" in stderr


def test_trace_text_and_json(golden_path, capsys):
    code, text, _ = run(capsys, "trace", "--doc", str(golden_path),
                        "btn_locate")
    assert code == 0
    assert "getLastKnownLocation" in text
    code, as_json, _ = run(capsys, "trace", "--doc", str(golden_path),
                           "btn_locate", "--json")
    assert code == 0
    payload = json.loads(as_json)
    assert payload["widget_id"] == 2131296312


def test_trace_unknown_widget_fails(golden_path, capsys):
    code, _, stderr = run(capsys, "trace", "--doc", str(golden_path),
                          "no_such_widget")
    assert code == 1
    assert "no widget" in stderr


def test_track_empty_result_exits_zero(golden_path, capsys):
    code, text, _ = run(capsys, "track", "--doc", str(golden_path),
                        "permission", "android.permission.CAMERA")
    assert code == 0
    assert "no matching widgets" in text


def test_check_exit_codes(golden_path, tmp_path, capsys):
    code, text, _ = run(capsys, "check", "--doc", str(golden_path))
    assert code == 0
    # strip the disclosures -> undisclosed -> exit 1
    doc = model.decode(golden_path.read_bytes())
    from pribom.model import WidgetEntry
    stripped_entries = tuple(
        WidgetEntry(identifier=e.identifier, bindings=e.bindings,
                    findings=e.findings, widget_min_api=e.widget_min_api,
                    tpls=e.tpls)
        for e in doc.entries)
    bad = model.PriBomDocument(
        app_package=doc.app_package, app_version_name=doc.app_version_name,
        app_version_code=doc.app_version_code, generated_at=doc.generated_at,
        tool_version=doc.tool_version, entries=stripped_entries)
    bad_path = tmp_path / "undisclosed.json"
    bad_path.write_bytes(model.encode(bad))
    code, text, _ = run(capsys, "check", "--doc", str(bad_path))
    assert code == 1
    assert "undisclosed" in text


def test_check_against_notice_inputs(golden_path, capsys):
    code, text, _ = run(capsys, "check", "--doc", str(golden_path),
                        "--policy", str(FIXTURES / "policy.txt"),
                        "--label", str(FIXTURES / "data_safety.json"),
                        "--json")
    assert code == 0
    payload = json.loads(text)
    assert payload["exit_status"] == 0


def test_diff_same_document_is_empty(golden_path, capsys):
    code, text, _ = run(capsys, "diff", str(golden_path), str(golden_path))
    assert code == 0
    assert "no changes" in text


def test_export_csv(golden_path, tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, _, _ = run(capsys, "export", "--doc", str(golden_path),
                     "--csv", str(target))
    assert code == 0
    doc = model.decode(golden_path.read_bytes())
    assert target.read_bytes() == model.export_csv(doc)


def test_config_file_supplies_defaults_but_flags_win(tmp_path, capsys):
    config = tmp_path / "config.json"
    out_from_config = tmp_path / "from_config.json"
    config.write_text(json.dumps({
        "apk": str(FIXTURES / "fixture.apk"),
        "out": str(out_from_config),
    }))
    code, _, _ = run(capsys, "--config", str(config), "generate")
    assert code == 0
    assert out_from_config.exists()

    out_from_flag = tmp_path / "from_flag.json"
    code, _, _ = run(capsys, "--config", str(config), "generate",
                     "--out", str(out_from_flag))
    assert code == 0
    assert out_from_flag.exists()


def test_missing_document_file(capsys, tmp_path):
    code, _, stderr = run(capsys, "trace", "--doc",
                          str(tmp_path / "absent.json"), "x")
    assert code == 1
    assert "error" in stderr


def test_generate_merge_from_previous_document(golden_path, tmp_path, capsys):
    # hand-edit the previous document's disclosure text, regenerate with
    # --merge-from: the edit survives while machine sections are fresh
    doc = model.decode(golden_path.read_bytes())
    entry = doc.entry_by_name("btn_locate")
    edited = model.PolicySegment("Location", "manually refined wording",
                                 0, 0, ("manual:edited",))
    from pribom.model import WidgetEntry
    new_entries = tuple(
        WidgetEntry(identifier=e.identifier, bindings=e.bindings,
                    findings=e.findings, widget_min_api=e.widget_min_api,
                    tpls=e.tpls,
                    policy_segments=(edited,) if e is entry else e.policy_segments,
                    label_declarations=e.label_declarations)
        for e in doc.entries)
    previous = model.PriBomDocument(
        app_package=doc.app_package, app_version_name=doc.app_version_name,
        app_version_code=doc.app_version_code, generated_at=doc.generated_at,
        tool_version=doc.tool_version, entries=new_entries)
    prev_path = tmp_path / "previous.json"
    prev_path.write_bytes(model.encode(previous))

    out = tmp_path / "merged.json"
    code, _, _ = run(capsys, "generate",
                     "--apk", str(FIXTURES / "fixture.apk"),
                     "--policy", str(FIXTURES / "policy.txt"),
                     "--label", str(FIXTURES / "data_safety.json"),
                     "--merge-from", str(prev_path), "--out", str(out))
    assert code == 0
    merged = model.decode(out.read_bytes())
    assert merged.entry_by_name("btn_locate").policy_segments[0].text \
        == "manually refined wording"
    assert merged.entry_by_name("btn_locate").findings  # machine data fresh


def test_generate_with_remote_metadata_stub(tmp_path, capsys):
    import json as jsonlib
    import threading
    from http.server import BaseHTTPRequestHandler, HTTPServer

    payload = {"latest_version": "9.9", "publish_date_latest": "2025-01-01",
               "publish_date_current_versions": {"1": "2010-01-01"}}

    class Stub(BaseHTTPRequestHandler):
        def do_GET(self):
            blob = jsonlib.dumps(payload).encode()
            self.send_response(200)
            self.send_header("Content-Length", str(len(blob)))
            self.end_headers()
            self.wfile.write(blob)

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), Stub)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    try:
        out = tmp_path / "out.json"
        cache = tmp_path / "cache.json"
        code, _, _ = run(capsys, "generate",
                         "--apk", str(FIXTURES / "fixture.apk"),
                         "--out", str(out), "--fetch-metadata",
                         "--metadata-url",
                         f"http://127.0.0.1:{server.server_address[1]}",
                         "--metadata-cache", str(cache))
        assert code == 0
        doc = model.decode(out.read_bytes())
        tpl = doc.entry_by_name("btn_locate").tpls[0]
        assert tpl.latest_version == "9.9"
        assert tpl.publish_date_current == "2010-01-01"
        assert cache.exists()
    finally:
        server.shutdown()
        server.server_close()


def test_fetch_metadata_requires_url(capsys):
    code, _, stderr = run(capsys, "generate",
                          "--apk", str(FIXTURES / "fixture.apk"),
                          "--fetch-metadata")
    assert code == 1
    assert "metadata url" in stderr


def test_listener_setter_extension_file(tmp_path, capsys):
    setters = tmp_path / "setters.json"
    setters.write_text(json.dumps({
        "setOnSwipeListener": {"event": "touch", "callback": "onSwipe",
                               "params": ["Landroid/view/View;"]}}))
    out = tmp_path / "out.json"
    code, _, _ = run(capsys, "generate",
                     "--apk", str(FIXTURES / "fixture.apk"),
                     "--out", str(out),
                     "--listener-setters", str(setters),
                     "--icon-attributes", "android:background,android:src")
    assert code == 0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "setOnWarpListener": {"event": "warp", "callback": "onWarp",
                              "params": []}}))
    code, _, stderr = run(capsys, "generate",
                          "--apk", str(FIXTURES / "fixture.apk"),
                          "--out", str(out), "--listener-setters", str(bad))
    assert code == 1
    assert "canonical vocabulary" in stderr
