// Bootstrap: wire the view-model to the page and re-render on change.
import { ApiClient } from "./api.js";
import { renderCheck, renderConflict, renderDetail, renderInventory, renderTrace, } from "./render.js";
import { ViewModel } from "./state.js";
const vm = new ViewModel(new ApiClient(""));
function rerender() {
    const root = document.getElementById("app");
    if (!root) {
        return;
    }
    root.replaceChildren();
    const banner = renderConflict(vm, () => {
        void vm.resolveConflict().then(rerender);
    });
    if (banner) {
        root.append(banner);
    }
    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    const editorToggle = document.createElement("button");
    editorToggle.textContent = vm.editorMode ? "Editor mode: on" : "Editor mode: off";
    editorToggle.addEventListener("click", () => {
        vm.toggleEditorMode();
        rerender();
    });
    toolbar.append(editorToggle);
    const filterSelect = document.createElement("select");
    for (const option of ["", "data_type", "permission", "tpl", "policy"]) {
        const node = document.createElement("option");
        node.value = option;
        node.textContent = option || "no filter";
        filterSelect.append(node);
    }
    filterSelect.value = vm.filter?.type ?? "";
    const filterValue = document.createElement("input");
    filterValue.placeholder = "filter value";
    filterValue.value = vm.filter?.value ?? "";
    const applyFilter = document.createElement("button");
    applyFilter.textContent = "Filter";
    applyFilter.addEventListener("click", () => {
        const type = filterSelect.value;
        vm.setFilter(type && filterValue.value
            ? { type, value: filterValue.value }
            : null);
        rerender();
    });
    toolbar.append(filterSelect, filterValue, applyFilter);
    const traceInput = document.createElement("input");
    traceInput.placeholder = "widget id or name";
    const traceButton = document.createElement("button");
    traceButton.textContent = "Trace";
    traceButton.addEventListener("click", () => {
        void vm.runTrace(traceInput.value).then(rerender);
    });
    const trackButton = document.createElement("button");
    trackButton.textContent = "Track";
    trackButton.addEventListener("click", () => {
        const type = (filterSelect.value || "data_type");
        void vm.runTrack(type, filterValue.value).then(rerender);
    });
    const checkButton = document.createElement("button");
    checkButton.textContent = "Run check";
    checkButton.addEventListener("click", () => {
        void vm.runCheck().then(rerender);
    });
    toolbar.append(traceInput, traceButton, trackButton, checkButton);
    root.append(toolbar);
    root.append(renderInventory(vm, (widgetId) => {
        vm.selectWidget(widgetId);
        rerender();
    }, (column) => {
        vm.setSort(column);
        rerender();
    }), renderDetail(vm, {
        onEditPolicy: (widgetId, index, text) => {
            const entry = vm.entry(widgetId);
            if (!entry) {
                return;
            }
            const staged = vm.pendingEdits.get(widgetId);
            const base = staged?.policy_segments ?? entry.policy_segments;
            const segments = base.map((segment, i) => i === index ? { ...segment, text } : segment);
            vm.stageEdit(widgetId, { policy_segments: segments });
            rerenderSaveButtonOnly();
        },
        onSave: (widgetId) => {
            void vm.saveEdit(widgetId).then(rerender);
        },
    }), renderTrace(vm), renderCheck(vm));
}
// Typing in a textarea must not rebuild the DOM under the cursor; only
// the save button's enabled state depends on pending edits.
function rerenderSaveButtonOnly() {
    const button = document.querySelector(".save-button");
    if (button && vm.selectedWidgetId !== null) {
        button.disabled = !vm.pendingEdits.has(vm.selectedWidgetId);
    }
}
void vm
    .load()
    .then(rerender)
    .catch((error) => {
    const root = document.getElementById("app");
    if (root) {
        root.textContent = `failed to fetch the document: ${error}`;
        root.className = "fetch-error";
    }
});
