"""End-to-end document generation.

Runs the stages in order: container parsing, widget extraction, call
graph, permission mapping, library detection, notice analysis, then
assembles and validates the document. Every stage writes soft failures
to the shared diagnostics channel; hard parse errors abort with the
failing module named.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import callgraph, model, notice, permissions, tpl, uiextract
from .apk import archive as apk_archive
from .apk import axml, dex
from .diagnostics import Diagnostics
from .errors import PribomError
from .model import PriBomDocument, WidgetEntry


@dataclass
class RunConfig:
    apk: str
    policy: str | None = None
    label: str | None = None
    out: str | None = None
    csv: str | None = None
    api_map: str | None = None
    permission_catalog: str | None = None
    widget_api_table: str | None = None
    tpl_signatures: str | None = None
    tpl_metadata: str | None = None
    lexicon: str | None = None
    taxonomy_map: str | None = None
    tpl_threshold: float = 0.8
    similarity_threshold: float = notice.DEFAULT_SIMILARITY_THRESHOLD
    fetch_metadata: bool = False
    metadata_url: str | None = None
    metadata_cache: str = "pribom.metadata-cache.json"
    dump_callgraph: str | None = None
    icon_attributes: tuple = field(default=uiextract.DEFAULT_ICON_ATTRIBUTES)
    listener_setters: dict = field(default_factory=dict)


class StageError(PribomError):
    """Wraps a stage failure with the module it came from."""

    def __init__(self, module: str, cause: Exception):
        self.module = module
        self.cause = cause
        super().__init__(f"[{module}] {cause}")


def _stage(module: str):
    class _Context:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, Exception) \
                    and not isinstance(exc, StageError):
                raise StageError(module, exc) from exc
            return False
    return _Context()


def _generated_at() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH", "")
    try:
        stamp = int(epoch)
    except ValueError:
        stamp = int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(stamp))


def _manifest_metadata(doc: axml.BinaryXmlDocument,
                       diags: Diagnostics) -> tuple[str, str, int]:
    root = doc.root
    package = root.attr("package", None)
    if not isinstance(package, str) or not package:
        raise PribomError("manifest has no package attribute")
    version_name = root.attr("versionName")
    if not isinstance(version_name, str):
        version_name = ""
        diags.info("apk-parser", "manifest has no android:versionName")
    version_code = root.attr("versionCode")
    if not isinstance(version_code, int):
        version_code = 0
        diags.info("apk-parser", "manifest has no android:versionCode")
    return package, version_name, version_code


def generate(config: RunConfig, diags: Diagnostics | None = None) -> PriBomDocument:
    diags = diags if diags is not None else Diagnostics()

    with _stage("apk-parser"):
        archive = apk_archive.open_apk(config.apk)
        manifest = axml.decode_binary_xml(archive.read(apk_archive.MANIFEST_MEMBER))
        package, version_name, version_code = _manifest_metadata(manifest, diags)
        if apk_archive.RESOURCES_MEMBER in archive.entry_index:
            from .apk import arsc
            table = arsc.parse_resource_table(
                archive.read(apk_archive.RESOURCES_MEMBER))
        else:
            from .apk.arsc import ResourceTable
            table = ResourceTable(package_id=0, entries={}, reverse={})
            diags.warning("apk-parser", "no resources.arsc; widget names "
                          "will not resolve")
        layout_docs = [axml.decode_binary_xml(archive.read(m))
                       for m in archive.layout_members()]
        menu_docs = [axml.decode_binary_xml(archive.read(m))
                     for m in archive.menu_members()]
        dex_model = dex.merge_models(
            [dex.parse_dex(archive.read(m)) for m in archive.dex_members()])

    with _stage("ui-extractor"):
        ui_config = uiextract.UiConfig(
            icon_attributes=tuple(config.icon_attributes),
            extra_listener_setters=dict(config.listener_setters))
        layout_widgets = uiextract.extract_layout_widgets(
            layout_docs + menu_docs, table, ui_config, diags)
        menu_ids = [w.identifier.widget_id for w in layout_widgets
                    if w.identifier.widget_type == uiextract.MENU_ITEM_TYPE]
        programmatic = uiextract.extract_programmatic_bindings(
            dex_model, table, menu_ids, ui_config, diags)
        declared = uiextract.resolve_xml_handlers(layout_widgets, dex_model, diags)
        widgets = uiextract.assemble_widgets(
            layout_widgets, programmatic + declared, table, diags)

    with _stage("callgraph"):
        hierarchy = callgraph.build_class_hierarchy(dex_model)
        graph = callgraph.build_call_graph(dex_model, hierarchy, diags)
        if config.dump_callgraph:
            Path(config.dump_callgraph).write_text(graph.dump(), "utf-8")
        reachable_by_widget = {}
        for identifier, bindings in widgets:
            reachable: set = set()
            for binding in bindings:
                reachable |= callgraph.reachable_methods(graph, binding.handler,
                                                         diags)
            reachable_by_widget[identifier.widget_id] = reachable

    with _stage("permission-mapper"):
        catalog = permissions.PermissionCatalog.load(config.permission_catalog)
        api_map = permissions.ApiPermissionMap.load(catalog, config.api_map)
        widget_table = permissions.WidgetApiTable.load(config.widget_api_table)
        findings_by_widget = {
            wid: permissions.map_apis(reachable, api_map, catalog, diags)
            for wid, reachable in reachable_by_widget.items()}

    with _stage("tpl-detector"):
        signatures = tpl.load_signatures(config.tpl_signatures)
        detections = tpl.detect(dex_model, signatures, config.tpl_threshold, diags)
        if config.fetch_metadata:
            if not config.metadata_url:
                raise PribomError("--fetch-metadata requires a metadata url")
            source = tpl.MetadataSource.remote(config.metadata_url,
                                               config.metadata_cache)
        else:
            source = tpl.MetadataSource.offline(config.tpl_metadata)
        tpls_by_widget = tpl.attribute_to_widgets(detections, reachable_by_widget)
        tpls_by_widget = {wid: tpl.enrich(records, source, diags)
                          for wid, records in tpls_by_widget.items()}

    with _stage("notice-analyzer"):
        segments = []
        declarations = []
        if config.policy:
            lexicon = notice.KeywordLexicon.load(config.lexicon)
            policy_text = notice.split_policy(
                Path(config.policy).read_text("utf-8"))
            segments = notice.segment(policy_text, lexicon,
                                      config.similarity_threshold)
        else:
            diags.warning("notice-analyzer",
                          "no privacy policy input; policy disclosure "
                          "sections left empty")
        if config.label:
            import json
            taxonomy = notice.TaxonomyMap.load(config.taxonomy_map)
            rows = json.loads(Path(config.label).read_text("utf-8"))
            declarations = notice.parse_label(rows, taxonomy, diags)
        else:
            diags.warning("notice-analyzer",
                          "no data-safety label input; label disclosure "
                          "sections left empty")

    with _stage("pribom-model"):
        entries = []
        for identifier, bindings in widgets:
            entries.append(WidgetEntry(
                identifier=identifier,
                bindings=bindings,
                findings=tuple(findings_by_widget[identifier.widget_id]),
                widget_min_api=permissions.widget_min_api(
                    identifier.widget_type, widget_table, diags),
                tpls=tuple(tpls_by_widget[identifier.widget_id]),
            ))
        entries = notice.attach(entries, segments, declarations)
        document = PriBomDocument(
            app_package=package,
            app_version_name=version_name,
            app_version_code=version_code,
            generated_at=_generated_at(),
            tool_version=model.TOOL_VERSION,
            entries=tuple(entries),
        )
        violations = model.validate(document, catalog.categories)
        for violation in violations:
            diags.add("pribom-model", "error", violation)
        if violations:
            raise PribomError(
                f"generated document failed validation: {violations[0]}")
    return document


def write_outputs(document: PriBomDocument, config: RunConfig,
                  diags: Diagnostics) -> list[str]:
    """Write pribom.json (+ csv), plus the diagnostics sidecar."""
    written = []
    out_path = Path(config.out or "pribom.json")
    out_path.write_bytes(model.encode(document))
    written.append(str(out_path))
    if config.csv:
        Path(config.csv).write_bytes(model.export_csv(document))
        written.append(config.csv)
    sidecar = out_path.with_name(out_path.stem + ".diagnostics.json")
    sidecar.write_text(diags.to_json(), "utf-8")
    written.append(str(sidecar))
    return written
