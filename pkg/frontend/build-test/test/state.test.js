import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiError } from "../src/api.js";
import { ViewModel, rowOf } from "../src/state.js";
function entryOf(widgetId, name, dataType = null) {
    const findings = dataType
        ? [{
                permission: "android.permission.ACCESS_COARSE_LOCATION",
                data_type: dataType,
                method_path: "Landroid/location/LocationManager;-getLastKnownLocation-" +
                    "(Ljava/lang/String;)Landroid/location/Location;",
                min_api_level: 1,
            }]
        : [];
    return {
        identifier: {
            widget_type: "android.widget.Button",
            widget_id: widgetId,
            widget_name: name,
            widget_src: [],
        },
        bindings: [{
                event: "click",
                handler: "com.example.A: void onClick(android.view.View)",
                origin: "programmatic",
            }],
        findings,
        widget_min_api: 1,
        tpls: [],
        policy_segments: dataType
            ? [{
                    data_type: dataType,
                    text: `we collect ${dataType.toLowerCase()} data`,
                    paragraph_index: 0,
                    sentence_index: 0,
                    evidence: ["keyword:data"],
                }]
            : [],
        label_declarations: [],
    };
}
function documentOf(entries) {
    return {
        schema_version: 1,
        app_package: "com.example.app",
        app_version_name: "1.0",
        app_version_code: 1,
        generated_at: "2024-01-01T00:00:00Z",
        tool_version: "0.1.0",
        data_type_catalog: [
            "Location", "Contacts", "Calendar", "Camera", "Microphone",
            "Phone", "SMS", "Storage", "Sensors", "CallLog",
        ],
        entries,
    };
}
// In-memory fake of the service: one document, revision bookkeeping,
// 409 on stale PATCH revisions - the contract the view-model codes to.
class FakeApi {
    constructor(doc) {
        this.doc = doc;
        this.revision = 1;
        this.saves = 0;
        this.patches = [];
    }
    async document() {
        return { revision: this.revision, document: structuredClone(this.doc) };
    }
    async widget(id) {
        const entry = this.doc.entries.find((e) => e.identifier.widget_id === id);
        if (!entry) {
            throw new ApiError(404, `no widget ${id}`);
        }
        return { revision: this.revision, entry: structuredClone(entry) };
    }
    async trace(selector) {
        const entry = this.doc.entries.find((e) => String(e.identifier.widget_id) === selector ||
            e.identifier.widget_name === selector);
        if (!entry) {
            throw new ApiError(404, `no widget matches '${selector}'`);
        }
        return { widget_id: entry.identifier.widget_id, entry, notes: [] };
    }
    async track(type, value) {
        const widgets = this.doc.entries.filter((e) => type === "data_type"
            ? e.findings.some((f) => f.data_type === value)
            : false);
        return {
            selector: { type, value },
            widget_ids: widgets.map((e) => e.identifier.widget_id),
            widgets: widgets.map((e) => ({
                widget_id: e.identifier.widget_id,
                widget_name: e.identifier.widget_name,
                widget_type: e.identifier.widget_type,
            })),
            policy_segments: [],
            label_declarations: [],
        };
    }
    async check() {
        return {
            undisclosed: [],
            channels: {
                policy: { channel: "policy", undisclosed: [], over_disclosed: [] },
                label: { channel: "label", undisclosed: [], over_disclosed: [] },
            },
            exit_status: 0,
        };
    }
    async patchDisclosure(widgetId, revision, edit) {
        if (revision !== this.revision) {
            throw new ApiError(409, `revision ${revision} is stale`);
        }
        this.patches.push({ widgetId, revision, edit });
        const entry = this.doc.entries.find((e) => e.identifier.widget_id === widgetId);
        if (!entry) {
            throw new ApiError(404, `no widget ${widgetId}`);
        }
        if (edit.policy_segments) {
            entry.policy_segments = edit.policy_segments;
        }
        if (edit.label_declarations) {
            entry.label_declarations = edit.label_declarations;
        }
        if (edit.widget_name !== undefined) {
            entry.identifier.widget_name = edit.widget_name;
        }
        this.revision += 1;
        return { revision: this.revision };
    }
    async save() {
        this.saves += 1;
        return { saved: "pribom.json" };
    }
}
function freshViewModel(entries) {
    const doc = documentOf(entries ?? [entryOf(1, "btn_locate", "Location"), entryOf(2, "btn_other")]);
    const api = new FakeApi(doc);
    return { api, vm: new ViewModel(api) };
}
test("load captures the snapshot and its revision", async () => {
    const { vm } = freshViewModel();
    await vm.load();
    assert.equal(vm.revision, 1);
    assert.equal(vm.snapshot?.entries.length, 2);
});
test("rows are derived from the fetched document and nothing else", async () => {
    const { api, vm } = freshViewModel();
    await vm.load();
    const rows = vm.rows();
    const served = (await api.document()).document;
    assert.deepEqual(rows, served.entries.map((e) => rowOf(e, false)));
    // spot-check no fabricated values: every permission string in the rows
    // exists in the served document
    const servedPermissions = new Set(served.entries.flatMap((e) => e.findings.map((f) => f.permission)));
    for (const row of rows) {
        for (const permission of row.codebase.permissions) {
            assert.ok(servedPermissions.has(permission));
        }
    }
});
test("empty document renders an empty row list", async () => {
    const { vm } = freshViewModel([]);
    await vm.load();
    assert.deepEqual(vm.rows(), []);
});
test("data_type filter restricts rows", async () => {
    const { vm } = freshViewModel();
    await vm.load();
    vm.setFilter({ type: "data_type", value: "Location" });
    const rows = vm.rows();
    assert.equal(rows.length, 1);
    assert.equal(rows[0]?.identifier.widgetName, "btn_locate");
    vm.setFilter(null);
    assert.equal(vm.rows().length, 2);
});
test("rows sort by column and flip direction on repeat", async () => {
    const { vm } = freshViewModel([
        entryOf(3, "charlie", "Location"),
        entryOf(1, "alpha"),
        entryOf(2, "bravo", "Contacts"),
    ]);
    await vm.load();
    assert.deepEqual(vm.rows().map((r) => r.widgetId), [1, 2, 3]);
    vm.setSort("widget_name");
    assert.deepEqual(vm.rows().map((r) => r.identifier.widgetName), ["alpha", "bravo", "charlie"]);
    vm.setSort("widget_name");
    assert.deepEqual(vm.rows().map((r) => r.identifier.widgetName), ["charlie", "bravo", "alpha"]);
    vm.setSort("data_type");
    assert.deepEqual(vm.rows().map((r) => r.widgetId), [1, 2, 3]);
});
test("track cross-highlights matching rows", async () => {
    const { vm } = freshViewModel();
    await vm.load();
    await vm.runTrack("data_type", "Location");
    const highlighted = vm.rows().filter((r) => r.highlighted);
    assert.deepEqual(highlighted.map((r) => r.widgetId), [1]);
});
test("trace 404 becomes an inline not-found, not a crash", async () => {
    const { vm } = freshViewModel();
    await vm.load();
    await vm.runTrace("missing_widget");
    assert.equal(vm.lastTrace, null);
    assert.match(vm.lastError ?? "", /not found/);
});
test("selecting an unknown widget is rejected", async () => {
    const { vm } = freshViewModel();
    await vm.load();
    assert.throws(() => vm.selectWidget(999), /not in the document/);
});
test("edits are gated by editor mode", async () => {
    const { vm } = freshViewModel();
    await vm.load();
    assert.throws(() => vm.stageEdit(1, { widget_name: "renamed" }), /editor mode is off/);
    vm.toggleEditorMode();
    vm.stageEdit(1, { widget_name: "renamed" });
    assert.ok(vm.pendingEdits.has(1));
});
test("pending edits must reference existing widget ids", async () => {
    const { vm } = freshViewModel();
    await vm.load();
    vm.toggleEditorMode();
    assert.throws(() => vm.stageEdit(12345, { widget_name: "ghost" }), /not in the document/);
});
test("save flow: PATCH with read revision, persist, refresh, clear", async () => {
    const { api, vm } = freshViewModel();
    await vm.load();
    vm.toggleEditorMode();
    vm.stageEdit(1, {
        policy_segments: [{
                data_type: "Location",
                text: "edited disclosure",
                paragraph_index: 0,
                sentence_index: 0,
                evidence: ["manual:edited"],
            }],
    });
    const saved = await vm.saveEdit(1);
    assert.equal(saved, true);
    assert.equal(api.patches[0]?.revision, 1);
    assert.equal(api.saves, 1);
    assert.equal(vm.revision, 2);
    assert.equal(vm.pendingEdits.size, 0);
    assert.equal(vm.entry(1)?.policy_segments[0]?.text, "edited disclosure");
});
test("stale revision surfaces the conflict prompt and keeps the edit", async () => {
    const { api, vm } = freshViewModel();
    await vm.load();
    // another client writes first
    await api.patchDisclosure(2, 1, { widget_name: "sniped" });
    vm.toggleEditorMode();
    vm.stageEdit(1, { widget_name: "mine" });
    const saved = await vm.saveEdit(1);
    assert.equal(saved, false);
    assert.ok(vm.conflict);
    assert.match(vm.conflict?.message ?? "", /reload and reapply/);
    assert.ok(vm.pendingEdits.has(1));
    // reload-and-reapply resolves it
    await vm.resolveConflict();
    assert.equal(vm.conflict, null);
    assert.equal(vm.revision, 2);
    assert.equal(await vm.saveEdit(1), true);
    assert.equal(vm.entry(1)?.identifier.widget_name, "mine");
});
