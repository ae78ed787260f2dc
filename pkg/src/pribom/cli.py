"""Command-line entry point.

Subcommands: generate, trace, track, check, diff, serve. Options may
also come from a JSON config file (--config); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import model, notice, pipeline, reports, server
from .diagnostics import Diagnostics
from .errors import PribomError


def _add_asset_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("data assets (defaults ship with the package)")
    group.add_argument("--api-map", help="api_permission_map.json override")
    group.add_argument("--permission-catalog", help="permission_catalog.json override")
    group.add_argument("--widget-api-table", help="widget_api_table.json override")
    group.add_argument("--tpl-signatures", help="tpl_signatures.json override")
    group.add_argument("--tpl-metadata", help="tpl_metadata.json override")
    group.add_argument("--lexicon", help="lexicon.json override")
    group.add_argument("--taxonomy-map", help="taxonomy_map.json override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pribom",
        description="Widget-indexed privacy inventories for Android packages")
    parser.add_argument("--config", help="JSON config file; flags win over it")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = {}  # command name -> its parser, for config layering

    gen = sub.add_parser("generate", help="run the pipeline over an APK")
    gen.add_argument("--apk", help="input APK path")
    gen.add_argument("--policy", help="privacy policy file (text or HTML)")
    gen.add_argument("--label", help="data safety label file (JSON)")
    gen.add_argument("--out", default="pribom.json", help="output document path")
    gen.add_argument("--csv", help="also write the flattened CSV here")
    gen.add_argument("--tpl-threshold", type=float, default=0.8)
    gen.add_argument("--similarity-threshold", type=float,
                     default=notice.DEFAULT_SIMILARITY_THRESHOLD)
    gen.add_argument("--fetch-metadata", action="store_true",
                     help="fetch TPL metadata from --metadata-url (cached)")
    gen.add_argument("--metadata-url", help="remote metadata endpoint base url")
    gen.add_argument("--metadata-cache", default="pribom.metadata-cache.json")
    gen.add_argument("--dump-callgraph", metavar="PATH",
                     help="write one caller<TAB>callee<TAB>kind line per edge")
    gen.add_argument("--merge-from", metavar="PREV",
                     help="carry human-edited disclosure fields over from a "
                          "previous document")
    gen.add_argument("--icon-attributes",
                     help="comma-separated namespace-qualified attribute "
                          "names that bind icons (replaces the default list)")
    gen.add_argument("--listener-setters", metavar="JSON",
                     help="JSON file adding listener registrations: "
                          '{"setOnX": {"event": ..., "callback": ..., '
                          '"params": [...]}}')
    _add_asset_flags(gen)

    trace = sub.add_parser("trace", help="widget -> code -> disclosures chain")
    trace.add_argument("--doc", default="pribom.json")
    trace.add_argument("widget", help="widget id (decimal or 0x hex) or name")
    trace.add_argument("--json", action="store_true", dest="as_json")

    track = sub.add_parser("track", help="data practice -> widgets")
    track.add_argument("--doc", default="pribom.json")
    track.add_argument("type", choices=reports.TRACK_SELECTORS)
    track.add_argument("value")
    track.add_argument("--json", action="store_true", dest="as_json")

    chk = sub.add_parser("check", help="disclosure consistency report")
    chk.add_argument("--doc", default="pribom.json")
    chk.add_argument("--policy", help="re-check against this policy file")
    chk.add_argument("--label", help="re-check against this label file")
    chk.add_argument("--similarity-threshold", type=float,
                     default=notice.DEFAULT_SIMILARITY_THRESHOLD)
    chk.add_argument("--json", action="store_true", dest="as_json")
    _add_asset_flags(chk)

    dif = sub.add_parser("diff", help="compare two documents of the same app")
    dif.add_argument("old")
    dif.add_argument("new")
    dif.add_argument("--json", action="store_true", dest="as_json")

    srv = sub.add_parser("serve", help="HTTP service + web UI over a document")
    srv.add_argument("--doc", default="pribom.json")
    srv.add_argument("--addr", default="127.0.0.1:8787")
    srv.add_argument("--assets", help="static assets directory "
                     "(default: frontend/dist if present)")

    exp = sub.add_parser("export", help="write the CSV export of a document")
    exp.add_argument("--doc", default="pribom.json")
    exp.add_argument("--csv", default="pribom.csv")

    parser.subcommands = {"generate": gen, "trace": trace, "track": track,
                          "check": chk, "diff": dif, "serve": srv,
                          "export": exp}
    return parser


def _apply_config_file(args: argparse.Namespace,
                       parser: argparse.ArgumentParser) -> None:
    if not args.config:
        return
    try:
        raw = json.loads(Path(args.config).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file: {exc}")
    if not isinstance(raw, dict):
        parser.error("config file must hold a JSON object")
    sub = parser.subcommands[args.command]
    # Flags win: config only fills values still at their parser default.
    for key, value in raw.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) == sub.get_default(attr):
            setattr(args, attr, value)


def _load_doc(path: str) -> model.PriBomDocument:
    return model.decode(Path(path).read_bytes())


def _ui_config_overrides(args) -> dict:
    overrides = {}
    if args.icon_attributes:
        overrides["icon_attributes"] = tuple(
            name.strip() for name in args.icon_attributes.split(",")
            if name.strip())
    if args.listener_setters:
        raw = json.loads(Path(args.listener_setters).read_text("utf-8"))
        setters = {}
        for setter, spec in raw.items():
            if spec["event"] not in model.EVENT_NAMES:
                raise PribomError(
                    f"listener setter {setter}: event {spec['event']!r} is "
                    "not in the canonical vocabulary")
            setters[setter] = (spec["event"], spec["callback"],
                               tuple(spec.get("params", ())))
        overrides["listener_setters"] = setters
    return overrides


def _cmd_generate(args) -> int:
    if not args.apk:
        print("error: --apk is required for generate", file=sys.stderr)
        return 2
    diags = Diagnostics()
    config = pipeline.RunConfig(
        apk=args.apk, policy=args.policy, label=args.label,
        out=args.out, csv=args.csv,
        api_map=args.api_map, permission_catalog=args.permission_catalog,
        widget_api_table=args.widget_api_table,
        tpl_signatures=args.tpl_signatures, tpl_metadata=args.tpl_metadata,
        lexicon=args.lexicon, taxonomy_map=args.taxonomy_map,
        tpl_threshold=args.tpl_threshold,
        similarity_threshold=args.similarity_threshold,
        fetch_metadata=args.fetch_metadata, metadata_url=args.metadata_url,
        metadata_cache=args.metadata_cache,
        dump_callgraph=args.dump_callgraph,
        **_ui_config_overrides(args))
    try:
        document = pipeline.generate(config, diags)
    except pipeline.StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.merge_from:
        previous = _load_doc(args.merge_from)
        result = model.merge(document, previous)
        document = result.document
        for warning in result.warnings:
            diags.warning("pribom-model", warning)
    written = pipeline.write_outputs(document, config, diags)
    print(f"generated {written[0]} with {len(document.entries)} widget entries")
    for path in written[1:]:
        print(f"wrote {path}")
    warnings = sum(1 for e in diags.entries if e.severity != "info")
    if warnings:
        print(f"{warnings} warning(s); see the diagnostics sidecar")
    return 0


def _cmd_trace(args) -> int:
    doc = _load_doc(args.doc)
    try:
        payload = reports.trace_payload(doc, args.widget)
    except reports.UnknownWidgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(reports.trace_text(payload), end="")
    return 0


def _cmd_track(args) -> int:
    doc = _load_doc(args.doc)
    payload = reports.track_payload(doc, args.type, args.value)
    if args.as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(reports.track_text(payload), end="")
    return 0


def _cmd_check(args) -> int:
    doc = _load_doc(args.doc)
    extra_policy = None
    extra_label = None
    if args.policy:
        lexicon = notice.KeywordLexicon.load(args.lexicon)
        policy_text = notice.split_policy(Path(args.policy).read_text("utf-8"))
        segments = notice.segment(policy_text, lexicon,
                                  args.similarity_threshold)
        extra_policy = {s.data_type for s in segments}
    if args.label:
        taxonomy = notice.TaxonomyMap.load(args.taxonomy_map)
        rows = json.loads(Path(args.label).read_text("utf-8"))
        extra_label = {d.data_type for d in notice.parse_label(rows, taxonomy)}
    report = reports.check(doc, extra_policy, extra_label)
    if args.as_json:
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    else:
        print(reports.check_text(report), end="")
    return report.exit_status


def _cmd_diff(args) -> int:
    payload = reports.diff_payload(_load_doc(args.old), _load_doc(args.new))
    if args.as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(reports.diff_text(payload), end="")
    return 0


def _cmd_serve(args) -> int:
    doc = _load_doc(args.doc)
    server.serve(doc, args.addr, document_path=args.doc,
                 assets_dir=args.assets)
    return 0


def _cmd_export(args) -> int:
    doc = _load_doc(args.doc)
    Path(args.csv).write_bytes(model.export_csv(doc))
    print(f"wrote {args.csv}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "trace": _cmd_trace,
    "track": _cmd_track,
    "check": _cmd_check,
    "diff": _cmd_diff,
    "serve": _cmd_serve,
    "export": _cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config_file(args, parser)
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PribomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
