"""Canonical inventory document model.

The document is a widget-indexed privacy inventory: one entry per UI
widget, each carrying four sections (identifier, code/permission,
third-party libraries, notice disclosures). Documents are immutable
values; every operation returns a new document. Construction
canonicalizes list order (entries by widget id, nested lists by their
natural sort keys) so that encoding is deterministic and byte-equal
outputs are comparable.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import descriptors
from .errors import DocumentError

SCHEMA_VERSION = 1
TOOL_VERSION = "0.1.0"

# The ten data type categories, fixed order. Dangerous permissions are
# partitioned across exactly these.
DATA_TYPES = (
    "Location",
    "Contacts",
    "Calendar",
    "Camera",
    "Microphone",
    "Phone",
    "SMS",
    "Storage",
    "Sensors",
    "CallLog",
)

# Canonical event vocabulary. Extensions are possible through the UI
# extractor configuration but documents only ever carry these names.
EVENT_NAMES = (
    "click",
    "long_click",
    "touch",
    "item_selected",
    "item_click",
    "checked_change",
    "text_changed",
    "focus_change",
)

BINDING_ORIGINS = ("xml_attribute", "programmatic", "framework_callback")

# Sentinel widget type for ids seen only in code, never in a layout.
UNKNOWN_WIDGET_TYPE = "unknown"


@dataclass(frozen=True, order=True)
class MethodRef:
    """A fully qualified method reference.

    The canonical text form is ``<class>: <return> <name>(<params>)``
    with Java-style pretty type names, e.g.::

        com.example.A: boolean onOptionsItemSelected(android.view.MenuItem)
    """

    class_name: str
    method_name: str
    param_descriptors: tuple[str, ...]
    return_descriptor: str

    def render(self) -> str:
        params = ", ".join(descriptors.pretty_type(p) for p in self.param_descriptors)
        ret = descriptors.pretty_type(self.return_descriptor)
        return f"{self.class_name}: {ret} {self.method_name}({params})"

    @classmethod
    def parse(cls, text: str) -> "MethodRef":
        head, sep, sig = text.partition(": ")
        if not sep or not head:
            raise DocumentError(f"bad method reference {text!r}: missing ': '")
        open_paren = sig.find("(")
        if open_paren < 0 or not sig.endswith(")"):
            raise DocumentError(f"bad method reference {text!r}: missing parameter list")
        ret_and_name = sig[:open_paren].rsplit(" ", 1)
        if len(ret_and_name) != 2:
            raise DocumentError(f"bad method reference {text!r}: missing return type")
        ret_pretty, name = ret_and_name
        params_pretty = sig[open_paren + 1:-1]
        if params_pretty.strip():
            params = tuple(descriptors.type_descriptor(p.strip())
                           for p in params_pretty.split(","))
        else:
            params = ()
        return cls(class_name=head,
                   method_name=name,
                   param_descriptors=params,
                   return_descriptor=descriptors.type_descriptor(ret_pretty))

    def method_path(self) -> str:
        return descriptors.render_method_path(
            self.class_name, self.method_name,
            self.param_descriptors, self.return_descriptor)


@dataclass(frozen=True)
class WidgetIdentifier:
    widget_type: str
    widget_id: int
    widget_name: str | None = None
    widget_src: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "widget_src", tuple(self.widget_src))


@dataclass(frozen=True)
class EventBinding:
    event: str
    handler: MethodRef
    origin: str

    def sort_key(self):
        return (self.event, self.handler.render(), self.origin)


@dataclass(frozen=True)
class PermissionFinding:
    permission: str
    data_type: str
    method_path: str
    min_api_level: int

    def sort_key(self):
        return (self.data_type, self.permission, self.method_path, self.min_api_level)


@dataclass(frozen=True)
class TplRecord:
    name: str
    version: str
    latest_version: str | None = None
    publish_date_current: str | None = None
    publish_date_latest: str | None = None
    confidence: float = 1.0

    def sort_key(self):
        return (self.name, self.version)


@dataclass(frozen=True)
class PolicySegment:
    data_type: str
    text: str
    paragraph_index: int
    sentence_index: int
    evidence: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "evidence", tuple(self.evidence))

    def sort_key(self):
        return (self.data_type, self.paragraph_index, self.sentence_index, self.text)


@dataclass(frozen=True)
class LabelDeclaration:
    label_name: str
    data_type: str
    optional_flag: bool
    purposes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "purposes", tuple(self.purposes))

    def sort_key(self):
        return (self.data_type, self.label_name)


@dataclass(frozen=True)
class WidgetEntry:
    identifier: WidgetIdentifier
    bindings: tuple[EventBinding, ...] = ()
    findings: tuple[PermissionFinding, ...] = ()
    widget_min_api: int = 1
    tpls: tuple[TplRecord, ...] = ()
    policy_segments: tuple[PolicySegment, ...] = ()
    label_declarations: tuple[LabelDeclaration, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "bindings",
                           tuple(sorted(self.bindings, key=EventBinding.sort_key)))
        object.__setattr__(self, "findings",
                           tuple(sorted(self.findings, key=PermissionFinding.sort_key)))
        object.__setattr__(self, "tpls",
                           tuple(sorted(self.tpls, key=TplRecord.sort_key)))
        object.__setattr__(self, "policy_segments",
                           tuple(sorted(self.policy_segments, key=PolicySegment.sort_key)))
        object.__setattr__(self, "label_declarations",
                           tuple(sorted(self.label_declarations, key=LabelDeclaration.sort_key)))

    @property
    def widget_id(self) -> int:
        return self.identifier.widget_id

    def data_types(self) -> tuple[str, ...]:
        """Distinct data types collected by this widget, sorted."""
        return tuple(sorted({f.data_type for f in self.findings}))


@dataclass(frozen=True)
class PriBomDocument:
    app_package: str
    app_version_name: str
    app_version_code: int
    generated_at: str  # UTC timestamp, "YYYY-MM-DDTHH:MM:SSZ"
    tool_version: str = TOOL_VERSION
    entries: tuple[WidgetEntry, ...] = ()
    data_type_catalog: tuple[str, ...] = DATA_TYPES

    def __post_init__(self):
        object.__setattr__(self, "entries",
                           tuple(sorted(self.entries, key=lambda e: e.widget_id)))
        object.__setattr__(self, "data_type_catalog", tuple(self.data_type_catalog))

    def entry_for(self, widget_id: int) -> WidgetEntry | None:
        for entry in self.entries:
            if entry.widget_id == widget_id:
                return entry
        return None

    def entry_by_name(self, widget_name: str) -> WidgetEntry | None:
        for entry in self.entries:
            if entry.identifier.widget_name == widget_name:
                return entry
        return None

    def collected_data_types(self) -> dict[str, list[int]]:
        """Map of data type -> widget ids with a finding of that type."""
        out: dict[str, list[int]] = {}
        for entry in self.entries:
            for dt in entry.data_types():
                out.setdefault(dt, []).append(entry.widget_id)
        return out


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate(doc: PriBomDocument,
             permission_categories: Mapping[str, str] | None = None) -> list[str]:
    """Check every type invariant; returns human-readable violations.

    Violations are data, not failures: an empty list means the document
    is well-formed. When ``permission_categories`` is given (the
    dangerous-permission to data-type map), each finding's data type is
    additionally checked against the mapper's assignment.
    """
    violations: list[str] = []
    catalog = set(doc.data_type_catalog)

    if tuple(doc.data_type_catalog) != DATA_TYPES:
        violations.append("document: data_type_catalog must list the ten "
                          "categories in fixed order")
    if not doc.app_package or "." not in doc.app_package:
        violations.append("document: app_package must be a reverse-domain name")

    seen_ids: dict[int, int] = {}
    for idx, entry in enumerate(doc.entries):
        where = f"entry {idx} (widget_id {entry.widget_id})"
        ident = entry.identifier
        if ident.widget_id in seen_ids:
            violations.append(f"{where}: duplicate widget_id also used by "
                              f"entry {seen_ids[ident.widget_id]}")
        else:
            seen_ids[ident.widget_id] = idx
        if ident.widget_id == 0:
            violations.append(f"{where}: widget_id must be nonzero")
        if not ident.widget_type or (
                "." not in ident.widget_type
                and ident.widget_type != UNKNOWN_WIDGET_TYPE):
            violations.append(f"{where}: widget_type must be a qualified class name")
        if entry.widget_min_api < 1:
            violations.append(f"{where}: widget_min_api must be >= 1")

        for b in entry.bindings:
            if b.event not in EVENT_NAMES:
                violations.append(f"{where}: binding event {b.event!r} is not in "
                                  "the canonical event vocabulary")
            if b.origin not in BINDING_ORIGINS:
                violations.append(f"{where}: binding origin {b.origin!r} is invalid")
            try:
                rendered = b.handler.render()
                if MethodRef.parse(rendered) != b.handler:
                    violations.append(f"{where}: handler {rendered!r} does not round-trip")
            except Exception as exc:
                violations.append(f"{where}: handler is malformed: {exc}")

        for f in entry.findings:
            if f.data_type not in catalog:
                violations.append(f"{where}: finding data_type {f.data_type!r} "
                                  "is not in data_type_catalog")
            if permission_categories is not None:
                assigned = permission_categories.get(f.permission)
                if assigned != f.data_type:
                    violations.append(
                        f"{where}: finding data_type {f.data_type!r} does not match "
                        f"the mapper's category {assigned!r} for {f.permission}")
            if f.min_api_level < 1:
                violations.append(f"{where}: finding min_api_level must be >= 1")
            try:
                descriptors.parse_method_path(f.method_path)
            except Exception as exc:
                violations.append(f"{where}: finding method_path is malformed: {exc}")

        for t in entry.tpls:
            if not (0.0 <= t.confidence <= 1.0):
                violations.append(f"{where}: tpl {t.name} confidence {t.confidence} "
                                  "outside [0, 1]")
            if (t.latest_version is not None
                    and t.publish_date_current and t.publish_date_latest
                    and t.publish_date_latest < t.publish_date_current):
                violations.append(f"{where}: tpl {t.name} latest publish date "
                                  "precedes current publish date")

        for s in entry.policy_segments:
            if s.data_type not in catalog:
                violations.append(f"{where}: policy segment data_type "
                                  f"{s.data_type!r} is not in data_type_catalog")
            if not s.text:
                violations.append(f"{where}: policy segment text is empty")
            if not s.evidence:
                violations.append(f"{where}: policy segment evidence is empty")
            if s.paragraph_index < 0 or s.sentence_index < 0:
                violations.append(f"{where}: policy segment indices must be >= 0")

        finding_types = {f.data_type for f in entry.findings}
        for d in entry.label_declarations:
            if d.data_type not in catalog:
                violations.append(f"{where}: label data_type {d.data_type!r} "
                                  "is not in data_type_catalog")
            if d.data_type not in finding_types:
                violations.append(f"{where}: label {d.label_name!r} has no matching "
                                  f"finding with data_type {d.data_type!r}")
            if not d.purposes:
                violations.append(f"{where}: label {d.label_name!r} declares "
                                  "collection but lists no purposes")
    return violations


# ---------------------------------------------------------------------------
# Canonical JSON encoding
# ---------------------------------------------------------------------------

def _identifier_dict(i: WidgetIdentifier) -> dict:
    return {
        "widget_type": i.widget_type,
        "widget_id": i.widget_id,
        "widget_name": i.widget_name,
        "widget_src": list(i.widget_src),
    }


def entry_dict(e: WidgetEntry) -> dict:
    return {
        "identifier": _identifier_dict(e.identifier),
        "bindings": [
            {"event": b.event, "handler": b.handler.render(), "origin": b.origin}
            for b in e.bindings
        ],
        "findings": [
            {"permission": f.permission, "data_type": f.data_type,
             "method_path": f.method_path, "min_api_level": f.min_api_level}
            for f in e.findings
        ],
        "widget_min_api": e.widget_min_api,
        "tpls": [
            {"name": t.name, "version": t.version,
             "latest_version": t.latest_version,
             "publish_date_current": t.publish_date_current,
             "publish_date_latest": t.publish_date_latest,
             "confidence": t.confidence}
            for t in e.tpls
        ],
        "policy_segments": [
            {"data_type": s.data_type, "text": s.text,
             "paragraph_index": s.paragraph_index,
             "sentence_index": s.sentence_index,
             "evidence": list(s.evidence)}
            for s in e.policy_segments
        ],
        "label_declarations": [
            {"label_name": d.label_name, "data_type": d.data_type,
             "optional_flag": d.optional_flag, "purposes": list(d.purposes)}
            for d in e.label_declarations
        ],
    }


def document_dict(doc: PriBomDocument) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "app_package": doc.app_package,
        "app_version_name": doc.app_version_name,
        "app_version_code": doc.app_version_code,
        "generated_at": doc.generated_at,
        "tool_version": doc.tool_version,
        "data_type_catalog": list(doc.data_type_catalog),
        "entries": [entry_dict(e) for e in doc.entries],
    }


def encode(doc: PriBomDocument) -> bytes:
    """Serialize to canonical bytes: sorted keys, two-space indent, UTF-8."""
    text = json.dumps(document_dict(doc), sort_keys=True, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


class _Loc:
    """Tracks a JSON path while decoding, for precise error messages."""

    def __init__(self, path: str):
        self.path = path

    def child(self, key) -> "_Loc":
        return _Loc(f"{self.path}.{key}" if isinstance(key, str) else f"{self.path}[{key}]")

    def fail(self, message: str):
        raise DocumentError(f"{self.path}: {message}")


def _need(obj: dict, key: str, kind, loc: _Loc, allow_none: bool = False):
    if not isinstance(obj, dict):
        loc.fail(f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        loc.fail(f"missing field {key!r}")
    value = obj[key]
    if value is None and allow_none:
        return None
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        loc.fail(f"field {key!r} must be {kind.__name__}, got {type(value).__name__}")
    return value


def _decode_entry(obj: dict, loc: _Loc) -> WidgetEntry:
    ident_obj = _need(obj, "identifier", dict, loc)
    iloc = loc.child("identifier")
    name = _need(ident_obj, "widget_name", str, iloc, allow_none=True)
    identifier = WidgetIdentifier(
        widget_type=_need(ident_obj, "widget_type", str, iloc),
        widget_id=_need(ident_obj, "widget_id", int, iloc),
        widget_name=name,
        widget_src=tuple(_need(ident_obj, "widget_src", list, iloc)),
    )
    bindings = []
    for i, b in enumerate(_need(obj, "bindings", list, loc)):
        bloc = loc.child("bindings").child(i)
        bindings.append(EventBinding(
            event=_need(b, "event", str, bloc),
            handler=MethodRef.parse(_need(b, "handler", str, bloc)),
            origin=_need(b, "origin", str, bloc)))
    findings = []
    for i, f in enumerate(_need(obj, "findings", list, loc)):
        floc = loc.child("findings").child(i)
        findings.append(PermissionFinding(
            permission=_need(f, "permission", str, floc),
            data_type=_need(f, "data_type", str, floc),
            method_path=_need(f, "method_path", str, floc),
            min_api_level=_need(f, "min_api_level", int, floc)))
    tpls = []
    for i, t in enumerate(_need(obj, "tpls", list, loc)):
        tloc = loc.child("tpls").child(i)
        tpls.append(TplRecord(
            name=_need(t, "name", str, tloc),
            version=_need(t, "version", str, tloc),
            latest_version=_need(t, "latest_version", str, tloc, allow_none=True),
            publish_date_current=_need(t, "publish_date_current", str, tloc, allow_none=True),
            publish_date_latest=_need(t, "publish_date_latest", str, tloc, allow_none=True),
            confidence=_need(t, "confidence", float, tloc)))
    segments = []
    for i, s in enumerate(_need(obj, "policy_segments", list, loc)):
        sloc = loc.child("policy_segments").child(i)
        segments.append(PolicySegment(
            data_type=_need(s, "data_type", str, sloc),
            text=_need(s, "text", str, sloc),
            paragraph_index=_need(s, "paragraph_index", int, sloc),
            sentence_index=_need(s, "sentence_index", int, sloc),
            evidence=tuple(_need(s, "evidence", list, sloc))))
    labels = []
    for i, d in enumerate(_need(obj, "label_declarations", list, loc)):
        dloc = loc.child("label_declarations").child(i)
        labels.append(LabelDeclaration(
            label_name=_need(d, "label_name", str, dloc),
            data_type=_need(d, "data_type", str, dloc),
            optional_flag=_need(d, "optional_flag", bool, dloc),
            purposes=tuple(_need(d, "purposes", list, dloc))))
    return WidgetEntry(
        identifier=identifier,
        bindings=tuple(bindings),
        findings=tuple(findings),
        widget_min_api=_need(obj, "widget_min_api", int, loc),
        tpls=tuple(tpls),
        policy_segments=tuple(segments),
        label_declarations=tuple(labels),
    )


def decode(data: bytes) -> PriBomDocument:
    """Parse canonical document bytes, reporting position on bad input."""
    try:
        obj = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise DocumentError(f"input is not UTF-8: {exc.reason}", position=exc.start)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"input is not valid JSON: {exc.msg}", position=exc.pos)
    loc = _Loc("document")
    if not isinstance(obj, dict):
        loc.fail("top-level value must be an object")
    version = _need(obj, "schema_version", int, loc)
    if version != SCHEMA_VERSION:
        loc.fail(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})")
    entries = []
    for i, e in enumerate(_need(obj, "entries", list, loc)):
        eloc = loc.child("entries").child(i)
        if not isinstance(e, dict):
            eloc.fail("entry must be an object")
        entries.append(_decode_entry(e, eloc))
    return PriBomDocument(
        app_package=_need(obj, "app_package", str, loc),
        app_version_name=_need(obj, "app_version_name", str, loc),
        app_version_code=_need(obj, "app_version_code", int, loc),
        generated_at=_need(obj, "generated_at", str, loc),
        tool_version=_need(obj, "tool_version", str, loc),
        entries=tuple(entries),
        data_type_catalog=tuple(_need(obj, "data_type_catalog", list, loc)),
    )


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

CSV_HEADER = (
    "widget_type", "widget_id", "widget_name", "widget_src",
    "events", "handlers", "widget_min_api",
    "permission", "data_type", "method_path", "permission_min_api",
    "tpl_names", "policy_excerpt", "label_name", "label_optional",
    "label_purposes",
)

_JOIN = "; "


def _dedupe(items: Iterable[str]) -> list[str]:
    seen: dict[str, None] = {}
    for item in items:
        seen.setdefault(item)
    return list(seen)


def export_csv(doc: PriBomDocument) -> bytes:
    """Flatten to a spreadsheet: one row per (entry, data type) pair.

    A widget with no findings still emits one row with the permission
    columns left empty; an empty widget_src renders as the literal
    string "none".
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for entry in doc.entries:
        ident = entry.identifier
        base = [
            ident.widget_type,
            str(ident.widget_id),
            ident.widget_name or "",
            _JOIN.join(ident.widget_src) if ident.widget_src else "none",
            _JOIN.join(_dedupe(b.event for b in entry.bindings)),
            _JOIN.join(_dedupe(b.handler.render() for b in entry.bindings)),
            str(entry.widget_min_api),
        ]
        data_types = entry.data_types()
        if not data_types:
            writer.writerow(base + [""] * 9)
            continue
        for dt in data_types:
            findings = [f for f in entry.findings if f.data_type == dt]
            segments = [s for s in entry.policy_segments if s.data_type == dt]
            labels = [d for d in entry.label_declarations if d.data_type == dt]
            writer.writerow(base + [
                _JOIN.join(_dedupe(f.permission for f in findings)),
                dt,
                _JOIN.join(_dedupe(f.method_path for f in findings)),
                _JOIN.join(_dedupe(str(f.min_api_level) for f in findings)),
                _JOIN.join(_dedupe(t.name for t in entry.tpls)),
                _JOIN.join(s.text for s in segments),
                _JOIN.join(d.label_name for d in labels),
                _JOIN.join("yes" if d.optional_flag else "no" for d in labels),
                _JOIN.join(", ".join(d.purposes) for d in labels),
            ])
    return buf.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# Merge
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MergeResult:
    document: PriBomDocument
    warnings: tuple[str, ...]


def merge(base: PriBomDocument, overlay: PriBomDocument) -> MergeResult:
    """Layer human-edited disclosure fields over regenerated output.

    Entries match by widget_id. The overlay contributes only
    policy_segments, label_declarations and widget_name (each replacing
    the base's value when non-empty); every machine-derived section
    comes from the base. Overlay entries without a base counterpart are
    dropped and reported as warnings.
    """
    if base.app_package != overlay.app_package:
        raise DocumentError(
            f"cannot merge documents for different packages: "
            f"{base.app_package!r} vs {overlay.app_package!r}")
    overlay_by_id = {e.widget_id: e for e in overlay.entries}
    merged_entries = []
    for entry in base.entries:
        over = overlay_by_id.pop(entry.widget_id, None)
        if over is None:
            merged_entries.append(entry)
            continue
        identifier = entry.identifier
        if over.identifier.widget_name:
            identifier = WidgetIdentifier(
                widget_type=identifier.widget_type,
                widget_id=identifier.widget_id,
                widget_name=over.identifier.widget_name,
                widget_src=identifier.widget_src)
        merged_entries.append(WidgetEntry(
            identifier=identifier,
            bindings=entry.bindings,
            findings=entry.findings,
            widget_min_api=entry.widget_min_api,
            tpls=entry.tpls,
            policy_segments=over.policy_segments or entry.policy_segments,
            label_declarations=over.label_declarations or entry.label_declarations,
        ))
    warnings = tuple(
        f"overlay entry for unknown widget_id {wid} dropped"
        for wid in sorted(overlay_by_id))
    doc = PriBomDocument(
        app_package=base.app_package,
        app_version_name=base.app_version_name,
        app_version_code=base.app_version_code,
        generated_at=base.generated_at,
        tool_version=base.tool_version,
        entries=tuple(merged_entries),
        data_type_catalog=base.data_type_catalog,
    )
    return MergeResult(document=doc, warnings=warnings)
