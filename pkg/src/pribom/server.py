"""Long-running HTTP service over one document.

Single-writer/multi-reader: reads take a snapshot under the lock,
PATCH requests carry the revision they read and get 409 on a stale one
(optimistic concurrency). Saves go through a temp file plus rename so
a crash never leaves a torn document. The web UI's static assets are
served from a directory when one is configured or found.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import model, reports
from .errors import DocumentError, PribomError
from .model import (LabelDeclaration, PolicySegment, PriBomDocument,
                    WidgetEntry, WidgetIdentifier)

_WIDGET_ROUTE = re.compile(r"^/api/widgets/(\d+)$")
_TRACE_ROUTE = re.compile(r"^/api/trace/(.+)$")
_DISCLOSURE_ROUTE = re.compile(r"^/api/widgets/(\d+)/disclosure$")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".map": "application/json",
}

_FALLBACK_PAGE = b"""<!doctype html>
<title>pribom</title>
<h1>pribom service</h1>
<p>No web assets found. The JSON API is available under /api/.</p>
"""


class DocumentState:
    """The in-memory document plus its optimistic-concurrency revision."""

    def __init__(self, document: PriBomDocument, path: str | None):
        self._lock = threading.Lock()
        self.document = document
        self.path = path
        self.revision = 1

    def snapshot(self) -> tuple[PriBomDocument, int]:
        with self._lock:
            return self.document, self.revision

    def patch_disclosure(self, widget_id: int, revision: int, body: dict) -> int:
        """Apply a disclosure edit; returns the new revision."""
        with self._lock:
            if revision != self.revision:
                raise StaleRevisionError(
                    f"revision {revision} is stale (current {self.revision})")
            entry = self.document.entry_for(widget_id)
            if entry is None:
                raise reports.UnknownWidgetError(f"no widget {widget_id}")
            updated = _apply_disclosure_edit(entry, body)
            entries = tuple(updated if e.widget_id == widget_id else e
                            for e in self.document.entries)
            candidate = PriBomDocument(
                app_package=self.document.app_package,
                app_version_name=self.document.app_version_name,
                app_version_code=self.document.app_version_code,
                generated_at=self.document.generated_at,
                tool_version=self.document.tool_version,
                entries=entries,
                data_type_catalog=self.document.data_type_catalog)
            violations = model.validate(candidate)
            if violations:
                raise DocumentError("edit rejected: " + "; ".join(violations))
            self.document = candidate
            self.revision += 1
            return self.revision

    def save(self) -> str:
        with self._lock:
            if not self.path:
                raise PribomError("service was started without a document path")
            target = Path(self.path)
            temp = target.with_name(target.name + ".tmp")
            temp.write_bytes(model.encode(self.document))
            temp.replace(target)
            return str(target)


class StaleRevisionError(PribomError):
    pass


def _apply_disclosure_edit(entry: WidgetEntry, body: dict) -> WidgetEntry:
    """Build the edited entry; only disclosure fields and the name move."""
    allowed = {"revision", "policy_segments", "label_declarations", "widget_name"}
    unknown = set(body) - allowed
    if unknown:
        raise DocumentError(f"fields not editable through this endpoint: "
                            f"{', '.join(sorted(unknown))}")
    identifier = entry.identifier
    if "widget_name" in body:
        name = body["widget_name"]
        if name is not None and not isinstance(name, str):
            raise DocumentError("widget_name must be a string or null")
        identifier = WidgetIdentifier(
            widget_type=identifier.widget_type,
            widget_id=identifier.widget_id,
            widget_name=name,
            widget_src=identifier.widget_src)
    segments = entry.policy_segments
    if "policy_segments" in body:
        raw = body["policy_segments"]
        if not isinstance(raw, list):
            raise DocumentError("policy_segments must be a list")
        try:
            segments = tuple(PolicySegment(
                data_type=s["data_type"], text=s["text"],
                paragraph_index=int(s.get("paragraph_index", 0)),
                sentence_index=int(s.get("sentence_index", 0)),
                evidence=tuple(s.get("evidence") or ("manual:edited",)))
                for s in raw)
        except (KeyError, TypeError) as exc:
            raise DocumentError(f"malformed policy segment: {exc}")
    labels = entry.label_declarations
    if "label_declarations" in body:
        raw = body["label_declarations"]
        if not isinstance(raw, list):
            raise DocumentError("label_declarations must be a list")
        try:
            labels = tuple(LabelDeclaration(
                label_name=d["label_name"], data_type=d["data_type"],
                optional_flag=bool(d.get("optional_flag", False)),
                purposes=tuple(d.get("purposes", ())))
                for d in raw)
        except (KeyError, TypeError) as exc:
            raise DocumentError(f"malformed label declaration: {exc}")
    return WidgetEntry(
        identifier=identifier,
        bindings=entry.bindings,
        findings=entry.findings,
        widget_min_api=entry.widget_min_api,
        tpls=entry.tpls,
        policy_segments=segments,
        label_declarations=labels)


def _make_handler(state: DocumentState, assets_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        # -- helpers -------------------------------------------------------

        def _send_json(self, payload, status=200):
            blob = json.dumps(payload, sort_keys=True).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(blob)))
            self.end_headers()
            self.wfile.write(blob)

        def _send_error_json(self, status, message):
            self._send_json({"error": message}, status=status)

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            if not raw:
                return {}
            try:
                body = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise DocumentError(f"malformed request body: {exc}")
            if not isinstance(body, dict):
                raise DocumentError("request body must be a JSON object")
            return body

        def _serve_asset(self, path: str):
            if assets_dir is None:
                self._send_page(_FALLBACK_PAGE)
                return
            relative = path.lstrip("/") or "index.html"
            target = (assets_dir / relative).resolve()
            if not str(target).startswith(str(assets_dir.resolve())) \
                    or not target.is_file():
                if relative == "index.html":
                    self._send_page(_FALLBACK_PAGE)
                else:
                    self._send_error_json(404, f"no asset {relative}")
                return
            blob = target.read_bytes()
            ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(blob)))
            self.end_headers()
            self.wfile.write(blob)

        def _send_page(self, blob: bytes):
            self.send_response(200)
            self.send_header("Content-Type", "text/html; charset=utf-8")
            self.send_header("Content-Length", str(len(blob)))
            self.end_headers()
            self.wfile.write(blob)

        # -- methods -------------------------------------------------------

        def do_GET(self):
            url = urlparse(self.path)
            doc, revision = state.snapshot()
            try:
                if url.path == "/api/document":
                    self._send_json({"revision": revision,
                                     "document": model.document_dict(doc)})
                elif url.path == "/api/widgets":
                    self._send_json({"revision": revision, "widgets": [
                        {"widget_id": e.widget_id,
                         "widget_name": e.identifier.widget_name,
                         "widget_type": e.identifier.widget_type,
                         "data_types": list(e.data_types())}
                        for e in doc.entries]})
                elif _WIDGET_ROUTE.match(url.path):
                    widget_id = int(_WIDGET_ROUTE.match(url.path).group(1))
                    entry = doc.entry_for(widget_id)
                    if entry is None:
                        self._send_error_json(404, f"no widget {widget_id}")
                    else:
                        self._send_json({"revision": revision,
                                         "entry": model.entry_dict(entry)})
                elif _TRACE_ROUTE.match(url.path):
                    selector = _TRACE_ROUTE.match(url.path).group(1)
                    self._send_json(reports.trace_payload(doc, selector))
                elif url.path == "/api/track":
                    query = parse_qs(url.query)
                    selector_type = (query.get("type") or [""])[0]
                    value = (query.get("value") or [""])[0]
                    self._send_json(reports.track_payload(doc, selector_type,
                                                          value))
                elif url.path == "/api/diff":
                    query = parse_qs(url.query)
                    against = (query.get("against") or [""])[0]
                    if not against:
                        self._send_error_json(400, "missing against=<path>")
                        return
                    other = model.decode(Path(against).read_bytes())
                    self._send_json(reports.diff_payload(other, doc))
                else:
                    self._serve_asset(url.path)
            except reports.UnknownWidgetError as exc:
                self._send_error_json(404, str(exc))
            except (DocumentError, FileNotFoundError) as exc:
                self._send_error_json(400, str(exc))

        def do_POST(self):
            url = urlparse(self.path)
            try:
                if url.path == "/api/check":
                    doc, _ = state.snapshot()
                    report = reports.check(doc)
                    self._send_json(report.as_dict())
                elif url.path == "/api/save":
                    self._send_json({"saved": state.save()})
                else:
                    self._send_error_json(404, f"no endpoint {url.path}")
            except PribomError as exc:
                self._send_error_json(400, str(exc))

        def do_PATCH(self):
            url = urlparse(self.path)
            match = _DISCLOSURE_ROUTE.match(url.path)
            if not match:
                self._send_error_json(404, f"no endpoint {url.path}")
                return
            widget_id = int(match.group(1))
            try:
                body = self._read_body()
                if "revision" not in body:
                    raise DocumentError("body must carry the revision it read")
                revision = body["revision"]
                if not isinstance(revision, int):
                    raise DocumentError("revision must be an integer")
                new_revision = state.patch_disclosure(widget_id, revision, body)
                self._send_json({"revision": new_revision})
            except StaleRevisionError as exc:
                self._send_error_json(409, str(exc))
            except reports.UnknownWidgetError as exc:
                self._send_error_json(404, str(exc))
            except DocumentError as exc:
                self._send_error_json(400, str(exc))

    return Handler


def find_assets_dir(explicit: str | None = None) -> Path | None:
    if explicit:
        path = Path(explicit)
        return path if path.is_dir() else None
    import os
    env = os.environ.get("PRIBOM_ASSETS_DIR")
    if env and Path(env).is_dir():
        return Path(env)
    default = Path("frontend") / "dist"
    return default if default.is_dir() else None


def make_server(document: PriBomDocument, address: str,
                document_path: str | None = None,
                assets_dir: str | None = None) -> tuple[ThreadingHTTPServer, DocumentState]:
    host, _, port = address.rpartition(":")
    host = host or "127.0.0.1"
    state = DocumentState(document, document_path)
    handler = _make_handler(state, find_assets_dir(assets_dir))
    server = ThreadingHTTPServer((host, int(port)), handler)
    return server, state


def serve(document: PriBomDocument, address: str,
          document_path: str | None = None,
          assets_dir: str | None = None) -> None:
    server, _state = make_server(document, address, document_path, assets_dir)
    host, port = server.server_address[:2]
    print(f"listening on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
