// Live round-trip against the real service: load the golden document,
// edit one disclosure field, save, reload - the rendered state must
// equal the persisted document, and a stale-revision edit must surface
// the conflict prompt.

import assert from "node:assert/strict";
import { spawn } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import { copyFileSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { after, before, test } from "node:test";
import { fileURLToPath } from "node:url";

import { ApiClient } from "../src/api.js";
import { ViewModel, rowOf } from "../src/state.js";
import type { PribomDocument } from "../src/types.js";

// compiled location: frontend/build-test/test/<this>.js -> repo root is 4 up
const repoRoot = resolve(fileURLToPath(import.meta.url), "../../../..");
const goldenPath = join(repoRoot, "tests", "fixtures", "golden_pribom.json");

let child: ChildProcess | null = null;
let baseUrl = "";
let docPath = "";
let workDir = "";

before(async () => {
  workDir = mkdtempSync(join(tmpdir(), "pribom-ui-"));
  docPath = join(workDir, "pribom.json");
  copyFileSync(goldenPath, docPath);

  child = spawn(
    "python3",
    ["-m", "pribom.cli", "serve", "--doc", docPath, "--addr", "127.0.0.1:0"],
    { stdio: ["ignore", "pipe", "inherit"] },
  );
  baseUrl = await new Promise<string>((resolvePromise, rejectPromise) => {
    const timer = setTimeout(
      () => rejectPromise(new Error("service did not start within 15s")),
      15_000,
    );
    let buffered = "";
    child!.stdout!.on("data", (chunk: Buffer) => {
      buffered += chunk.toString();
      const match = buffered.match(/listening on (http:\/\/[^\s]+)/);
      if (match) {
        clearTimeout(timer);
        resolvePromise(match[1]!);
      }
    });
    child!.on("exit", (code) => {
      clearTimeout(timer);
      rejectPromise(new Error(`service exited early with code ${code}`));
    });
  });
});

after(() => {
  child?.kill();
  if (workDir) {
    rmSync(workDir, { recursive: true, force: true });
  }
});

function client(): ApiClient {
  return new ApiClient(baseUrl, (input, init) => fetch(input, init));
}

test("golden document loads and renders from served data only", async () => {
  const vm = new ViewModel(client());
  await vm.load();
  assert.equal(vm.snapshot?.app_package, "com.example.fixture");
  const rows = vm.rows();
  assert.equal(rows.length, 2);
  assert.deepEqual(
    rows,
    vm.snapshot!.entries.map((e) => rowOf(e, false)),
  );
  const locate = rows.find((r) => r.identifier.widgetName === "btn_locate");
  assert.ok(locate);
  assert.deepEqual(locate.codebase.dataTypes, ["Location"]);
});

test("edit one disclosure, save, reload: rendered state equals persisted document", async () => {
  const vm = new ViewModel(client());
  await vm.load();
  const widgetId = vm
    .snapshot!.entries.find((e) => e.identifier.widget_name === "btn_locate")!
    .identifier.widget_id;

  vm.toggleEditorMode();
  const segments = vm.entry(widgetId)!.policy_segments.map((segment) => ({
    ...segment,
    text: "with your permission we may collect coarse location information.",
  }));
  vm.stageEdit(widgetId, { policy_segments: segments });
  assert.equal(await vm.saveEdit(widgetId), true);

  // fresh session, as after a browser reload
  const reloaded = new ViewModel(client());
  await reloaded.load();
  const persisted = JSON.parse(readFileSync(docPath, "utf-8")) as PribomDocument;
  assert.deepEqual(reloaded.snapshot, persisted);
  assert.deepEqual(
    reloaded.rows(),
    persisted.entries.map((e) => rowOf(e, false)),
  );
  const entry = reloaded.entry(widgetId)!;
  assert.equal(
    entry.policy_segments[0]?.text,
    "with your permission we may collect coarse location information.",
  );
});

test("stale-revision edit surfaces the conflict prompt", async () => {
  const first = new ViewModel(client());
  const second = new ViewModel(client());
  await first.load();
  await second.load();
  assert.equal(first.revision, second.revision);

  first.toggleEditorMode();
  second.toggleEditorMode();
  const widgetId = first.snapshot!.entries[0]!.identifier.widget_id;

  first.stageEdit(widgetId, { widget_name: "renamed_by_first" });
  assert.equal(await first.saveEdit(widgetId), true);

  second.stageEdit(widgetId, { widget_name: "renamed_by_second" });
  assert.equal(await second.saveEdit(widgetId), false);
  assert.ok(second.conflict);
  assert.match(second.conflict!.message, /reload and reapply/);

  await second.resolveConflict();
  assert.equal(second.conflict, null);
  assert.equal(await second.saveEdit(widgetId), true);
  const fresh = new ViewModel(client());
  await fresh.load();
  assert.equal(
    fresh.entry(widgetId)!.identifier.widget_name,
    "renamed_by_second",
  );
});
