/**
 * Scripted browser session against a live service running the 20-post
 * acceptance fixture: list the queue, edit a draft, reprompt with code
 * disallowed, approve, watch items leave the queue, and verify that a 409
 * conflict preserves the reviewer's unsaved edit buffer.
 */

import { ChildProcess, spawn } from "node:child_process";
import { copyFileSync, mkdtempSync, writeFileSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { JSDOM } from "jsdom";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { DashboardApp } from "../src/app.js";
import { EditBufferStore } from "../src/state.js";
import type { ItemView } from "../src/types.js";

const REPO_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "../..");
const TOKEN = "e2e-reviewer-token";

let server: ChildProcess;
let baseUrl: string;
let serverLog = "";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitFor<T>(
  probe: () => Promise<T | undefined> | T | undefined,
  what: string,
  timeoutMs = 20_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = await probe();
    if (value !== undefined) return value;
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}\nserver log:\n${serverLog}`);
    }
    await new Promise((r) => setTimeout(r, 50));
  }
}

beforeAll(async () => {
  const workDir = mkdtempSync(path.join(tmpdir(), "taidesk-e2e-"));
  copyFileSync(
    path.join(REPO_ROOT, "fixtures", "acceptance", "posts.json"),
    path.join(workDir, "posts.json"),
  );
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  const config = {
    bind: `127.0.0.1:${port}`,
    storage: { path: path.join(workDir, "store.ndjson") },
    llm: { kind: "mock" },
    reviewers: [
      { actor_id: "ta-e2e", display_name: "E2E Reviewer", token: TOKEN },
      { actor_id: "ta-rival", display_name: "Rival Reviewer", token: "rival-token" },
    ],
    courses: [
      {
        course_id: "CS180",
        forum: { base_url: workDir, course_ref: "CS180" },
        poll_interval_s: 3600,
        token_budget: 4096,
      },
    ],
  };
  const configPath = path.join(workDir, "taidesk.json");
  writeFileSync(configPath, JSON.stringify(config));

  server = spawn("python3", ["-m", "taidesk.cli", "serve", "--config", configPath], {
    cwd: REPO_ROOT,
    stdio: ["ignore", "pipe", "pipe"],
  });
  server.stdout?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));
  server.stderr?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));

  await waitFor(async () => {
    try {
      await fetch(`${baseUrl}/api/queue`);
      return true;
    } catch {
      return undefined;
    }
  }, "server to accept connections");

  // the startup poll cycle ingests the fixture; wait until all 20 drafts land
  const client = new ApiClient(baseUrl, TOKEN);
  await waitFor(async () => {
    const queue = await client.queue("CS180");
    return queue.length === 20 ? true : undefined;
  }, "all 20 fixture posts to reach the queue");
});

afterAll(async () => {
  if (server && server.exitCode === null) {
    server.kill("SIGTERM");
    await new Promise((resolve) => server.once("exit", resolve));
  }
});

interface Session {
  app: DashboardApp;
  root: HTMLElement;
  buffers: EditBufferStore;
  client: ApiClient;
}

async function openDashboard(): Promise<Session> {
  const dom = new JSDOM('<div id="app"></div>', { url: "http://localhost/" });
  const root = dom.window.document.getElementById("app") as HTMLElement;
  const client = new ApiClient(baseUrl, TOKEN);
  const buffers = new EditBufferStore(dom.window.localStorage);
  const app = new DashboardApp(root, client, {
    courseId: "CS180",
    pollIntervalMs: 3_600_000, // the tests drive refreshes explicitly
    buffers,
  });
  await app.start();
  return { app, root, client, buffers };
}

function queueRows(root: HTMLElement): HTMLElement[] {
  return Array.from(root.querySelectorAll<HTMLElement>('[data-action="open-item"]'));
}

function click(root: HTMLElement, selector: string): void {
  const el = root.querySelector<HTMLElement>(selector);
  if (!el) throw new Error(`nothing matches ${selector}\n${root.innerHTML}`);
  el.click();
}

function noticeText(root: HTMLElement): string {
  return root.querySelector('[data-testid="notice"]')?.textContent ?? "";
}

describe("scripted review session", () => {
  it("lists the queue with the fixture posts, oldest first", async () => {
    const { app, root } = await openDashboard();
    const rows = queueRows(root);
    expect(rows.length).toBe(20);
    expect(rows[0].textContent).toContain("Segfault when deleting the last list node");
    app.stop();
  });

  it("edits a draft, approves it, and sees it leave the queue", async () => {
    const { app, root } = await openDashboard();
    const before = queueRows(root).length;
    const itemId = queueRows(root)[0].dataset.itemId as string;

    click(root, `[data-action="open-item"][data-item-id="${itemId}"]`);
    await waitFor(
      () => (root.querySelector('[data-testid="edit-text"]') ? true : undefined),
      "review screen",
    );

    const editBox = root.querySelector<HTMLTextAreaElement>('[data-testid="edit-text"]')!;
    const newText = "Walk the list and keep the previous pointer; update it before freeing.";
    editBox.value = newText;
    editBox.dispatchEvent(new (root.ownerDocument.defaultView as any).Event("input"));

    click(root, '[data-action="save-edit"]');
    await waitFor(
      () => (noticeText(root).includes("Edit saved") ? true : undefined),
      "edit confirmation",
    );
    expect(root.innerHTML).toContain("edited:");

    click(root, '[data-testid="approve"]');
    await waitFor(
      () => (root.querySelector('[data-testid="queue"]') ? true : undefined),
      "return to queue",
    );
    await waitFor(async () => {
      await app.refresh();
      return queueRows(root).length === before - 1 ? true : undefined;
    }, "the approved item to leave the queue");

    const ids = queueRows(root).map((r) => r.dataset.itemId);
    expect(ids).not.toContain(itemId);
    app.stop();
  });

  it("reprompts with code disallowed and gets a constrained draft #2", async () => {
    const { app, root, client } = await openDashboard();
    const before = queueRows(root).length;
    const itemId = queueRows(root)[0].dataset.itemId as string;

    click(root, `[data-action="open-item"][data-item-id="${itemId}"]`);
    await waitFor(
      () => (root.querySelector('[data-testid="reprompt-panel"]') ? true : undefined),
      "review screen",
    );

    const codeAllowed = root.querySelector<HTMLInputElement>('[data-testid="code-allowed"]')!;
    codeAllowed.checked = false; // disallow code
    const preserve = root.querySelector<HTMLInputElement>('[data-testid="preserve-history"]')!;
    preserve.checked = true;

    click(root, '[data-action="reprompt"]');
    await waitFor(
      () => (noticeText(root).includes("Reprompt accepted") ? true : undefined),
      "reprompt acknowledgement",
    );

    // the item comes back to the queue with a second, constrained draft
    const item = await waitFor(async (): Promise<ItemView | undefined> => {
      await app.refresh();
      const current = await client.item(itemId);
      return current.state === "AWAITING_REVIEW" && current.drafts.length === 2
        ? current
        : undefined;
    }, "the regenerated draft");
    expect(item.drafts[1].prompt_record.text).toContain(
      "Do not include code in your response.",
    );
    expect(item.drafts[1].prompt_record.text).toContain(item.drafts[0].raw_output);
    expect(root.innerHTML).toContain("Draft #2");

    // finish the item so later tests see a smaller queue
    click(root, '[data-testid="approve"]');
    await waitFor(async () => {
      await app.refresh();
      return root.querySelector('[data-testid="queue"]') &&
        queueRows(root).length === before - 1
        ? true
        : undefined;
    }, "queue to shrink after approve");
    app.stop();
  });

  it("keeps the edit buffer when another reviewer wins the version race", async () => {
    const { app, root, buffers } = await openDashboard();
    const itemId = queueRows(root)[0].dataset.itemId as string;
    const version = Number(queueRows(root)[0].dataset.version);

    click(root, `[data-action="open-item"][data-item-id="${itemId}"]`);
    await waitFor(
      () => (root.querySelector('[data-testid="edit-text"]') ? true : undefined),
      "review screen",
    );

    const editBox = root.querySelector<HTMLTextAreaElement>('[data-testid="edit-text"]')!;
    const carefulEdit = "My careful, not-yet-saved rewrite of this draft.";
    editBox.value = carefulEdit;
    editBox.dispatchEvent(new (root.ownerDocument.defaultView as any).Event("input"));

    // a rival reviewer approves the same version out-of-band
    const rival = new ApiClient(baseUrl, "rival-token");
    await rival.approve(itemId, version);

    click(root, '[data-testid="approve"]');
    await waitFor(
      () => (noticeText(root).includes("Someone else acted") ? true : undefined),
      "conflict banner",
    );

    // the view reloaded (the item is no longer reviewable), but the buffer survived
    expect(buffers.load(itemId)).toBe(carefulEdit);
    expect(root.querySelector('[data-testid="item-state"]')?.textContent).not.toBe(
      "AWAITING_REVIEW",
    );
    app.stop();
  });

  it("renders metrics from the live service", async () => {
    const { app, root } = await openDashboard();
    click(root, '[data-action="nav"][data-screen="metrics"]');
    await waitFor(
      () => (root.querySelector('[data-testid="metrics"]') ? true : undefined),
      "metrics screen",
    );
    const total = root.querySelector('[data-testid="items-total"]')?.textContent;
    expect(total).toBe("20");
    const edited = Number(root.querySelector('[data-testid="edited"]')?.textContent);
    expect(edited).toBeGreaterThanOrEqual(1);
    app.stop();
  });
});
