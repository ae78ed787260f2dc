// View-model for the explorer: one document snapshot plus UI state.
// Everything here is DOM-free and fully derived from the fetched
// document; rendering never invents values the service did not send.
import { ApiError } from "./api.js";
// The four column groups of the inventory table, in table order.
export const SECTION_NAMES = [
    "UI Widget Identifier",
    "Codebase and Permission",
    "Third-Party Library",
    "Privacy Notice Disclosure",
];
function sortKey(entry, column) {
    switch (column) {
        case "widget_id":
            return entry.identifier.widget_id;
        case "widget_name":
            return entry.identifier.widget_name ?? "";
        case "widget_type":
            return entry.identifier.widget_type;
        case "data_type":
            return [...new Set(entry.findings.map((f) => f.data_type))]
                .sort()
                .join(";");
    }
}
function dedupe(values) {
    return [...new Set(values)];
}
export function rowOf(entry, highlighted) {
    return {
        widgetId: entry.identifier.widget_id,
        identifier: {
            widgetType: entry.identifier.widget_type,
            widgetId: entry.identifier.widget_id,
            widgetName: entry.identifier.widget_name ?? "",
            widgetSrc: entry.identifier.widget_src.length
                ? entry.identifier.widget_src.join("; ")
                : "none",
        },
        codebase: {
            events: dedupe(entry.bindings.map((b) => b.event)),
            handlers: dedupe(entry.bindings.map((b) => b.handler)),
            minApiLevel: entry.widget_min_api,
            permissions: dedupe(entry.findings.map((f) => f.permission)),
            dataTypes: dedupe(entry.findings.map((f) => f.data_type)),
            methodPaths: dedupe(entry.findings.map((f) => f.method_path)),
        },
        tpl: {
            names: dedupe(entry.tpls.map((t) => t.name)),
            versions: dedupe(entry.tpls.map((t) => `${t.name} ${t.version}`)),
        },
        notice: {
            policyExcerpts: entry.policy_segments.map((s) => s.text),
            labelNames: entry.label_declarations.map((d) => d.label_name),
        },
        highlighted,
    };
}
function matchesFilter(entry, filter) {
    switch (filter.type) {
        case "data_type":
            return entry.findings.some((f) => f.data_type === filter.value);
        case "permission":
            return entry.findings.some((f) => f.permission === filter.value);
        case "tpl":
            return entry.tpls.some((t) => t.name === filter.value);
        case "policy": {
            const needle = filter.value.toLowerCase();
            return entry.policy_segments.some((s) => s.text.toLowerCase().includes(needle));
        }
    }
}
export class ViewModel {
    constructor(api) {
        this.api = api;
        this.snapshot = null;
        this.revision = 0;
        this.selectedWidgetId = null;
        this.filter = null;
        this.sort = { column: "widget_id", descending: false };
        this.highlightedIds = new Set();
        this.pendingEdits = new Map();
        this.lastCheck = null;
        this.lastTrace = null;
        this.lastTrack = null;
        this.conflict = null;
        this.editorMode = false;
        this.lastError = null;
    }
    async load() {
        const response = await this.api.document();
        this.snapshot = response.document;
        this.revision = response.revision;
        if (this.selectedWidgetId !== null &&
            !this.entry(this.selectedWidgetId)) {
            this.selectedWidgetId = null;
        }
    }
    entry(widgetId) {
        return (this.snapshot?.entries.find((e) => e.identifier.widget_id === widgetId) ?? null);
    }
    // One row per widget; filter restricts, sort orders, track results
    // highlight. Ties keep document (widget id) order.
    rows() {
        if (!this.snapshot) {
            return [];
        }
        const entries = this.snapshot.entries.filter((e) => this.filter ? matchesFilter(e, this.filter) : true);
        const { column, descending } = this.sort;
        const ordered = [...entries].sort((a, b) => {
            const ka = sortKey(a, column);
            const kb = sortKey(b, column);
            const base = ka < kb ? -1 : ka > kb ? 1 : 0;
            const tie = a.identifier.widget_id - b.identifier.widget_id;
            return (descending ? -base : base) || tie;
        });
        return ordered.map((e) => rowOf(e, this.highlightedIds.has(e.identifier.widget_id)));
    }
    // Clicking the same column again flips the direction.
    setSort(column) {
        if (this.sort.column === column) {
            this.sort = { column, descending: !this.sort.descending };
        }
        else {
            this.sort = { column, descending: false };
        }
    }
    selectWidget(widgetId) {
        if (widgetId !== null && !this.entry(widgetId)) {
            throw new Error(`widget ${widgetId} is not in the document`);
        }
        this.selectedWidgetId = widgetId;
    }
    setFilter(filter) {
        this.filter = filter;
    }
    toggleEditorMode() {
        this.editorMode = !this.editorMode;
    }
    async runTrace(selector) {
        try {
            this.lastTrace = await this.api.trace(selector);
            this.lastError = null;
        }
        catch (error) {
            this.lastTrace = null;
            this.lastError =
                error instanceof ApiError && error.status === 404
                    ? `not found: ${selector}`
                    : String(error);
        }
    }
    async runTrack(type, value) {
        this.lastTrack = await this.api.track(type, value);
        this.highlightedIds = new Set(this.lastTrack.widget_ids);
    }
    async runCheck() {
        this.lastCheck = await this.api.check();
    }
    // Stage a disclosure edit locally. Edits are gated by editor mode and
    // must reference a widget present in the snapshot.
    stageEdit(widgetId, edit) {
        if (!this.editorMode) {
            throw new Error("editor mode is off; edits are read-only");
        }
        if (!this.entry(widgetId)) {
            throw new Error(`widget ${widgetId} is not in the document`);
        }
        const existing = this.pendingEdits.get(widgetId) ?? {};
        this.pendingEdits.set(widgetId, { ...existing, ...edit });
    }
    // PATCH with the revision this snapshot was served at, then persist.
    // A stale revision surfaces as a conflict prompt; the pending edit
    // stays staged so "reload and reapply" can resolve it.
    async saveEdit(widgetId) {
        const edit = this.pendingEdits.get(widgetId);
        if (!edit) {
            throw new Error(`no pending edit for widget ${widgetId}`);
        }
        try {
            const response = await this.api.patchDisclosure(widgetId, this.revision, edit);
            this.revision = response.revision;
        }
        catch (error) {
            if (error instanceof ApiError && error.status === 409) {
                this.conflict = {
                    widgetId,
                    message: "someone else changed the document; reload and reapply your edit",
                };
                return false;
            }
            throw error;
        }
        await this.api.save();
        this.pendingEdits.delete(widgetId);
        this.conflict = null;
        await this.load();
        return true;
    }
    // Conflict resolution: fetch the fresh snapshot (new revision), keep
    // the staged edit, and let the user save again.
    async resolveConflict() {
        this.conflict = null;
        await this.load();
    }
}
