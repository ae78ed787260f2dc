// DOM rendering for the explorer. Pure functions from view-model state
// to elements; main.ts owns wiring and re-render scheduling.

import { SECTION_NAMES, ViewModel } from "./state.js";
import type { InventoryRow, SortColumn } from "./state.js";
import type { TracePayload, WidgetEntry } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function cell(values: string[] | string): HTMLTableCellElement {
  const td = el("td");
  const items = Array.isArray(values) ? values : [values];
  td.textContent = items.join("; ");
  return td;
}

const COLUMNS: { section: number; label: string; sort?: SortColumn }[] = [
  { section: 0, label: "Type", sort: "widget_type" },
  { section: 0, label: "ID", sort: "widget_id" },
  { section: 0, label: "Name", sort: "widget_name" },
  { section: 0, label: "Src" },
  { section: 1, label: "Event" },
  { section: 1, label: "Handler" },
  { section: 1, label: "API Level" },
  { section: 1, label: "Permission" },
  { section: 1, label: "Data Type", sort: "data_type" },
  { section: 2, label: "TPL" },
  { section: 3, label: "Policy Description" },
  { section: 3, label: "Label Declaration" },
];

export function renderInventory(
  vm: ViewModel,
  onSelect: (widgetId: number) => void,
  onSort?: (column: SortColumn) => void,
): HTMLElement {
  const container = el("section", "inventory");
  container.append(el("h2", undefined, "Inventory"));
  const rows = vm.rows();
  if (!rows.length) {
    container.append(
      el("p", "empty-state",
         vm.snapshot ? "No widgets match the current filter." :
                       "No document loaded."));
    return container;
  }
  const table = el("table", "inventory-table");
  const thead = el("thead");
  const groupRow = el("tr", "section-row");
  SECTION_NAMES.forEach((name, index) => {
    const th = el("th", "section", name);
    th.colSpan = COLUMNS.filter((c) => c.section === index).length;
    groupRow.append(th);
  });
  const labelRow = el("tr");
  for (const column of COLUMNS) {
    const th = el("th", column.sort ? "sortable" : undefined, column.label);
    if (column.sort && onSort) {
      const target = column.sort;
      if (vm.sort.column === target) {
        th.textContent += vm.sort.descending ? " ▾" : " ▴";
      }
      th.addEventListener("click", () => onSort(target));
    }
    labelRow.append(th);
  }
  thead.append(groupRow, labelRow);
  table.append(thead);

  const tbody = el("tbody");
  for (const row of rows) {
    const tr = el("tr", rowClasses(vm, row));
    tr.dataset["widgetId"] = String(row.widgetId);
    tr.append(
      cell(row.identifier.widgetType),
      cell(String(row.identifier.widgetId)),
      cell(row.identifier.widgetName),
      cell(row.identifier.widgetSrc),
      cell(row.codebase.events),
      cell(row.codebase.handlers),
      cell(String(row.codebase.minApiLevel)),
      cell(row.codebase.permissions),
      cell(row.codebase.dataTypes),
      cell(row.tpl.versions),
      cell(row.notice.policyExcerpts),
      cell(row.notice.labelNames),
    );
    tr.addEventListener("click", () => onSelect(row.widgetId));
    tbody.append(tr);
  }
  table.append(tbody);
  container.append(table);
  return container;
}

function rowClasses(vm: ViewModel, row: InventoryRow): string {
  const classes = ["widget-row"];
  if (row.highlighted) {
    classes.push("highlighted");
  }
  if (vm.selectedWidgetId === row.widgetId) {
    classes.push("selected");
  }
  return classes.join(" ");
}

export function renderDetail(
  vm: ViewModel,
  handlers: {
    onEditPolicy: (widgetId: number, index: number, text: string) => void;
    onSave: (widgetId: number) => void;
  },
): HTMLElement {
  const container = el("section", "detail");
  container.append(el("h2", undefined, "Widget detail"));
  if (vm.selectedWidgetId === null) {
    container.append(el("p", "empty-state", "Select a widget row."));
    return container;
  }
  const entry = vm.entry(vm.selectedWidgetId);
  if (!entry) {
    container.append(el("p", "empty-state", "Widget vanished after reload."));
    return container;
  }
  container.append(renderEntry(entry, vm, handlers));
  return container;
}

function renderEntry(
  entry: WidgetEntry,
  vm: ViewModel,
  handlers: {
    onEditPolicy: (widgetId: number, index: number, text: string) => void;
    onSave: (widgetId: number) => void;
  },
): HTMLElement {
  const widgetId = entry.identifier.widget_id;
  const box = el("div", "entry");

  const identity = el("dl");
  const pairs: [string, string][] = [
    ["Widget Type", entry.identifier.widget_type],
    ["Widget ID", String(widgetId)],
    ["Widget Name", entry.identifier.widget_name ?? ""],
    ["Widget Src", entry.identifier.widget_src.join("; ") || "none"],
    ["Android API Level", `Level ${entry.widget_min_api}`],
  ];
  for (const [label, value] of pairs) {
    identity.append(el("dt", undefined, label), el("dd", undefined, value));
  }
  box.append(identity);

  const bindings = el("ul", "bindings");
  for (const binding of entry.bindings) {
    bindings.append(
      el("li", undefined,
         `${binding.event} -> ${binding.handler} [${binding.origin}]`));
  }
  box.append(el("h3", undefined, "Bindings"), bindings);

  const findings = el("ul", "findings");
  for (const finding of entry.findings) {
    findings.append(
      el("li", undefined,
         `${finding.permission} (${finding.data_type}) via ` +
         `${finding.method_path} [min API ${finding.min_api_level}]`));
  }
  box.append(el("h3", undefined, "Permissions"), findings);

  const tpls = el("ul", "tpls");
  for (const tpl of entry.tpls) {
    const dates = [tpl.publish_date_current, tpl.publish_date_latest]
      .filter(Boolean).join(" -> ");
    tpls.append(
      el("li", undefined,
         `${tpl.name} ${tpl.version}` +
         (tpl.latest_version ? ` (latest ${tpl.latest_version}${dates ? ", " + dates : ""})` : "")));
  }
  box.append(el("h3", undefined, "Third-party libraries"), tpls);

  box.append(el("h3", undefined, "Privacy policy description"));
  entry.policy_segments.forEach((segment, index) => {
    const wrapper = el("div", "segment");
    wrapper.append(el("span", "badge", segment.data_type));
    if (vm.editorMode) {
      const area = el("textarea", "segment-edit");
      area.value = segment.text;
      area.addEventListener("input", () =>
        handlers.onEditPolicy(widgetId, index, area.value));
      wrapper.append(area);
    } else {
      wrapper.append(el("blockquote", undefined, segment.text));
    }
    box.append(wrapper);
  });

  box.append(el("h3", undefined, "Privacy label declaration"));
  for (const label of entry.label_declarations) {
    box.append(
      el("p", "label-decl",
         `[${label.label_name}] Optional: ${label.optional_flag ? "Yes" : "No"}; ` +
         `Purpose: ${label.purposes.join(", ")}`));
  }

  if (vm.editorMode) {
    const save = el("button", "save-button", "Save disclosure edits");
    save.disabled = !vm.pendingEdits.has(widgetId);
    save.addEventListener("click", () => handlers.onSave(widgetId));
    box.append(save);
  }
  return box;
}

export function renderTrace(vm: ViewModel): HTMLElement {
  const container = el("section", "trace");
  container.append(el("h2", undefined, "Trace"));
  if (vm.lastError) {
    container.append(el("p", "not-found", vm.lastError));
    return container;
  }
  const payload: TracePayload | null = vm.lastTrace;
  if (!payload) {
    return container;
  }
  const entry = payload.entry;
  const chain = el("ol", "chain");
  chain.append(
    el("li", undefined,
       `widget ${entry.identifier.widget_name ?? entry.identifier.widget_id} ` +
       `(${entry.identifier.widget_type})`));
  for (const binding of entry.bindings) {
    chain.append(el("li", undefined, `${binding.event} -> ${binding.handler}`));
  }
  for (const finding of entry.findings) {
    chain.append(
      el("li", undefined, `${finding.permission} -> ${finding.data_type}`));
    chain.append(el("li", undefined, finding.method_path));
  }
  for (const segment of entry.policy_segments) {
    chain.append(el("li", undefined, `policy: "${segment.text}"`));
  }
  for (const label of entry.label_declarations) {
    chain.append(el("li", undefined, `label: [${label.label_name}]`));
  }
  for (const note of payload.notes) {
    chain.append(el("li", "note", note));
  }
  container.append(chain);
  return container;
}

export function renderCheck(vm: ViewModel): HTMLElement {
  const container = el("section", "check");
  container.append(el("h2", undefined, "Consistency"));
  const report = vm.lastCheck;
  if (!report) {
    return container;
  }
  if (report.exit_status === 0 && !report.channels.policy.over_disclosed.length
      && !report.channels.label.over_disclosed.length
      && !report.channels.policy.undisclosed.length
      && !report.channels.label.undisclosed.length) {
    container.append(el("p", "ok", "Collected data types and disclosures are aligned."));
    return container;
  }
  const list = el("ul");
  for (const item of report.undisclosed) {
    list.append(el("li", "bad",
                   `${item.data_type} collected by ${item.widget_ids.join(", ")} ` +
                   "but disclosed in neither channel"));
  }
  for (const channel of [report.channels.policy, report.channels.label]) {
    for (const item of channel.undisclosed) {
      list.append(el("li", "warn",
                     `${channel.channel}: ${item.data_type} not disclosed`));
    }
    for (const dataType of channel.over_disclosed) {
      list.append(el("li", "warn",
                     `${channel.channel}: ${dataType} disclosed but never collected`));
    }
  }
  container.append(list);
  return container;
}

export function renderConflict(
  vm: ViewModel,
  onResolve: () => void,
): HTMLElement | null {
  if (!vm.conflict) {
    return null;
  }
  const banner = el("div", "conflict");
  banner.append(el("p", undefined, vm.conflict.message));
  const button = el("button", undefined, "Reload and reapply");
  button.addEventListener("click", onResolve);
  banner.append(button);
  return banner;
}
