"""Query operations over a generated document.

trace walks backward from a widget to its disclosures; track walks
forward from a data practice to the widgets it touches; check compares
collected data types against disclosed ones per notice channel; diff
reports structural changes between two builds of the same app.

Each operation produces one machine-readable payload that both the CLI
and the HTTP service return verbatim, plus a plain-text rendering for
terminals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DocumentError, PribomError
from .model import PriBomDocument, WidgetEntry, entry_dict

TRACK_SELECTORS = ("permission", "data_type", "tpl", "policy")


class UnknownWidgetError(PribomError):
    pass


def find_entry(doc: PriBomDocument, selector: str) -> WidgetEntry:
    """Resolve a widget by decimal id, 0x hex id, or resource name."""
    entry = None
    text = selector.strip()
    widget_id = None
    try:
        widget_id = int(text, 16) if text.lower().startswith("0x") else int(text)
    except ValueError:
        pass
    if widget_id is not None:
        entry = doc.entry_for(widget_id)
    if entry is None:
        entry = doc.entry_by_name(text)
    if entry is None:
        raise UnknownWidgetError(f"no widget matches {selector!r}")
    return entry


# ---------------------------------------------------------------------------
# trace
# ---------------------------------------------------------------------------

def trace_payload(doc: PriBomDocument, selector: str) -> dict:
    entry = find_entry(doc, selector)
    notes = []
    if not entry.findings:
        notes.append("no data practices detected")
    return {
        "widget_id": entry.widget_id,
        "entry": entry_dict(entry),
        "notes": notes,
    }


def _render_tpl(t: dict) -> str:
    line = f"tpl {t['name']} {t['version']}"
    extras = []
    if t["latest_version"]:
        extras.append(f"latest {t['latest_version']}")
    if t["publish_date_current"]:
        extras.append(f"published {t['publish_date_current']}")
    if t["publish_date_latest"]:
        extras.append(f"latest published {t['publish_date_latest']}")
    if extras:
        line += " (" + ", ".join(extras) + ")"
    return line


def trace_text(payload: dict) -> str:
    e = payload["entry"]
    ident = e["identifier"]
    lines = [f"widget {ident['widget_name'] or ident['widget_id']} "
             f"(id {ident['widget_id']})"]
    lines.append(f"  type: {ident['widget_type']}")
    src = "; ".join(ident["widget_src"]) if ident["widget_src"] else "none"
    lines.append(f"  src: {src}")
    lines.append(f"  min api level: {e['widget_min_api']}")
    for b in e["bindings"]:
        lines.append(f"  event {b['event']} -> {b['handler']} [{b['origin']}]")
    for f in e["findings"]:
        lines.append(f"  permission {f['permission']} "
                     f"({f['data_type']}, min api {f['min_api_level']})")
        lines.append(f"    via {f['method_path']}")
    for t in e["tpls"]:
        lines.append("  " + _render_tpl(t))
    for s in e["policy_segments"]:
        lines.append(f"  policy ({s['data_type']}): \"{s['text']}\"")
    for d in e["label_declarations"]:
        lines.append(f"  label [{d['label_name']}] ({d['data_type']}) "
                     f"optional: {'yes' if d['optional_flag'] else 'no'}; "
                     f"purposes: {', '.join(d['purposes'])}")
    for note in payload["notes"]:
        lines.append(f"  note: {note}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# track
# ---------------------------------------------------------------------------

def track_payload(doc: PriBomDocument, selector_type: str, value: str) -> dict:
    if selector_type not in TRACK_SELECTORS:
        raise DocumentError(f"track selector must be one of "
                            f"{', '.join(TRACK_SELECTORS)}")
    if not value:
        raise DocumentError("track selector value is empty")

    matches: list[WidgetEntry] = []
    needle = value.lower()
    for entry in doc.entries:
        if selector_type == "permission":
            hit = any(f.permission == value for f in entry.findings)
        elif selector_type == "data_type":
            hit = any(f.data_type == value for f in entry.findings)
        elif selector_type == "tpl":
            hit = any(t.name == value for t in entry.tpls)
        else:  # policy substring
            hit = any(needle in s.text.lower() for s in entry.policy_segments)
        if hit:
            matches.append(entry)

    # Which data types the selector implies, for filtering notice entries.
    if selector_type == "data_type":
        relevant = {value}
    elif selector_type == "permission":
        relevant = {f.data_type for e in matches for f in e.findings
                    if f.permission == value}
    else:
        relevant = None  # tpl / policy: keep all disclosure entries

    segments = []
    declarations = []
    for entry in matches:
        for s in entry.policy_segments:
            if selector_type == "policy" and needle not in s.text.lower():
                continue
            if relevant is not None and s.data_type not in relevant:
                continue
            item = {"widget_id": entry.widget_id, "data_type": s.data_type,
                    "text": s.text}
            if item not in segments:
                segments.append(item)
        for d in entry.label_declarations:
            if relevant is not None and d.data_type not in relevant:
                continue
            item = {"widget_id": entry.widget_id, "data_type": d.data_type,
                    "label_name": d.label_name}
            if item not in declarations:
                declarations.append(item)

    return {
        "selector": {"type": selector_type, "value": value},
        "widget_ids": [e.widget_id for e in matches],
        "widgets": [
            {"widget_id": e.widget_id,
             "widget_name": e.identifier.widget_name,
             "widget_type": e.identifier.widget_type}
            for e in matches
        ],
        "policy_segments": segments,
        "label_declarations": declarations,
    }


def track_text(payload: dict) -> str:
    sel = payload["selector"]
    lines = [f"track {sel['type']}={sel['value']}"]
    if not payload["widgets"]:
        lines.append("  no matching widgets")
    for w in payload["widgets"]:
        lines.append(f"  widget {w['widget_name'] or w['widget_id']} "
                     f"(id {w['widget_id']}, {w['widget_type']})")
    for s in payload["policy_segments"]:
        lines.append(f"  policy ({s['data_type']}): \"{s['text']}\"")
    for d in payload["label_declarations"]:
        lines.append(f"  label [{d['label_name']}] ({d['data_type']})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelReport:
    channel: str
    undisclosed: tuple  # (data_type, widget ids)
    over_disclosed: tuple  # data types

    def as_dict(self) -> dict:
        return {
            "channel": self.channel,
            "undisclosed": [{"data_type": dt, "widget_ids": list(ids)}
                            for dt, ids in self.undisclosed],
            "over_disclosed": list(self.over_disclosed),
        }


@dataclass(frozen=True)
class ConsistencyReport:
    policy: ChannelReport
    label: ChannelReport
    undisclosed: tuple  # (data_type, widget ids) absent from BOTH channels

    @property
    def clean(self) -> bool:
        return not (self.undisclosed or self.policy.undisclosed
                    or self.policy.over_disclosed or self.label.undisclosed
                    or self.label.over_disclosed)

    @property
    def exit_status(self) -> int:
        """1 iff some collected data type is disclosed in neither channel."""
        return 1 if self.undisclosed else 0

    def as_dict(self) -> dict:
        return {
            "undisclosed": [{"data_type": dt, "widget_ids": list(ids)}
                            for dt, ids in self.undisclosed],
            "channels": {
                "policy": self.policy.as_dict(),
                "label": self.label.as_dict(),
            },
            "exit_status": self.exit_status,
        }


def check(doc: PriBomDocument,
          extra_policy_types: set | None = None,
          extra_label_types: set | None = None) -> ConsistencyReport:
    """Compare collected data types against disclosures, per channel.

    The optional extra_* sets carry data types disclosed in the notice
    inputs but attached to no entry (the CLI passes them when --policy
    or --label are supplied), so over-disclosure that never reached a
    widget is still visible.
    """
    collected = doc.collected_data_types()
    policy_types = {s.data_type for e in doc.entries for s in e.policy_segments}
    label_types = {d.data_type for e in doc.entries for d in e.label_declarations}
    policy_types |= extra_policy_types or set()
    label_types |= extra_label_types or set()

    def channel(name: str, disclosed: set) -> ChannelReport:
        undisclosed = tuple(
            (dt, tuple(ids)) for dt, ids in sorted(collected.items())
            if dt not in disclosed)
        over = tuple(sorted(disclosed - set(collected)))
        return ChannelReport(channel=name, undisclosed=undisclosed,
                             over_disclosed=over)

    both_missing = tuple(
        (dt, tuple(ids)) for dt, ids in sorted(collected.items())
        if dt not in policy_types and dt not in label_types)
    return ConsistencyReport(
        policy=channel("policy", policy_types),
        label=channel("label", label_types),
        undisclosed=both_missing,
    )


def check_text(report: ConsistencyReport) -> str:
    lines = []
    if report.clean:
        lines.append("check: collected data types and disclosures are aligned")
    for dt, ids in report.undisclosed:
        lines.append(f"undisclosed: {dt} collected by widgets "
                     f"{', '.join(str(i) for i in ids)} but disclosed in "
                     "neither channel")
    for ch in (report.policy, report.label):
        for dt, ids in ch.undisclosed:
            lines.append(f"{ch.channel}: {dt} collected but not disclosed "
                         f"(widgets {', '.join(str(i) for i in ids)})")
        for dt in ch.over_disclosed:
            lines.append(f"{ch.channel}: {dt} disclosed but collected by "
                         "no widget (over-disclosure)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# diff
# ---------------------------------------------------------------------------

def _finding_key(f) -> tuple:
    return (f.permission, f.data_type, f.method_path, f.min_api_level)


def _binding_key(b) -> tuple:
    return (b.event, b.handler.render(), b.origin)


def _tpl_key(t) -> tuple:
    return (t.name, t.version)


def diff_payload(old: PriBomDocument, new: PriBomDocument) -> dict:
    if old.app_package != new.app_package:
        raise DocumentError(
            f"cannot diff documents for different packages: "
            f"{old.app_package!r} vs {new.app_package!r}")
    old_ids = {e.widget_id for e in old.entries}
    new_ids = {e.widget_id for e in new.entries}
    added_widgets = [entry_dict(new.entry_for(i))["identifier"]
                     for i in sorted(new_ids - old_ids)]
    removed_widgets = [entry_dict(old.entry_for(i))["identifier"]
                       for i in sorted(old_ids - new_ids)]

    def affected(data_type: str, doc: PriBomDocument) -> dict:
        """Notice entries sharing the finding's data type; the change
        touches exactly these when the inventory shifts."""
        segments = []
        labels = []
        for e in doc.entries:
            for s in e.policy_segments:
                if s.data_type == data_type:
                    item = {"widget_id": e.widget_id, "text": s.text}
                    if item not in segments:
                        segments.append(item)
            for d in e.label_declarations:
                if d.data_type == data_type:
                    item = {"widget_id": e.widget_id,
                            "label_name": d.label_name}
                    if item not in labels:
                        labels.append(item)
        disclosed = bool(segments or labels)
        return {"data_type": data_type,
                "policy_segments": segments,
                "label_declarations": labels,
                "disclosed": disclosed,
                "hint": None if disclosed
                else f"{data_type} has no disclosure entries; update the "
                     "privacy notice"}

    changed = []
    for widget_id in sorted(old_ids & new_ids):
        old_entry = old.entry_for(widget_id)
        new_entry = new.entry_for(widget_id)
        of = {_finding_key(f): f for f in old_entry.findings}
        nf = {_finding_key(f): f for f in new_entry.findings}
        ob = {_binding_key(b) for b in old_entry.bindings}
        nb = {_binding_key(b) for b in new_entry.bindings}
        ot = {_tpl_key(t) for t in old_entry.tpls}
        nt = {_tpl_key(t) for t in new_entry.tpls}
        added_findings = sorted(set(nf) - set(of))
        removed_findings = sorted(set(of) - set(nf))
        if not (added_findings or removed_findings or ob != nb or ot != nt):
            continue
        changed.append({
            "widget_id": widget_id,
            "added_findings": [
                {"permission": k[0], "data_type": k[1], "method_path": k[2],
                 "min_api_level": k[3], "affected_notice": affected(k[1], new)}
                for k in added_findings],
            "removed_findings": [
                {"permission": k[0], "data_type": k[1], "method_path": k[2],
                 "min_api_level": k[3], "affected_notice": affected(k[1], old)}
                for k in removed_findings],
            "added_bindings": [
                {"event": e, "handler": h, "origin": o}
                for e, h, o in sorted(nb - ob)],
            "removed_bindings": [
                {"event": e, "handler": h, "origin": o}
                for e, h, o in sorted(ob - nb)],
            "added_tpls": [{"name": n, "version": v} for n, v in sorted(nt - ot)],
            "removed_tpls": [{"name": n, "version": v} for n, v in sorted(ot - nt)],
        })
    return {
        "app_package": old.app_package,
        "added_widgets": added_widgets,
        "removed_widgets": removed_widgets,
        "changed_widgets": changed,
        "empty": not (added_widgets or removed_widgets or changed),
    }


def diff_text(payload: dict) -> str:
    if payload["empty"]:
        return "diff: no changes\n"
    lines = [f"diff for {payload['app_package']}"]
    for ident in payload["added_widgets"]:
        lines.append(f"  + widget {ident['widget_name'] or ident['widget_id']} "
                     f"(id {ident['widget_id']}, {ident['widget_type']})")
    for ident in payload["removed_widgets"]:
        lines.append(f"  - widget {ident['widget_name'] or ident['widget_id']} "
                     f"(id {ident['widget_id']}, {ident['widget_type']})")
    for change in payload["changed_widgets"]:
        lines.append(f"  widget {change['widget_id']}:")
        for f in change["added_findings"]:
            lines.append(f"    + finding {f['permission']} ({f['data_type']})")
            hint = f["affected_notice"]["hint"]
            if hint:
                lines.append(f"      ! {hint}")
        for f in change["removed_findings"]:
            lines.append(f"    - finding {f['permission']} ({f['data_type']})")
        for b in change["added_bindings"]:
            lines.append(f"    + binding {b['event']} -> {b['handler']}")
        for b in change["removed_bindings"]:
            lines.append(f"    - binding {b['event']} -> {b['handler']}")
        for t in change["added_tpls"]:
            lines.append(f"    + tpl {t['name']} {t['version']}")
        for t in change["removed_tpls"]:
            lines.append(f"    - tpl {t['name']} {t['version']}")
    return "\n".join(lines) + "\n"
