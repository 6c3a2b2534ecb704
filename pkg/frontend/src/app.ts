/**
 * The dashboard controller: screen state, polling, and action wiring.
 *
 * The dashboard holds no workflow logic of its own — every mutation goes
 * through the API with the version it last saw as If-Match, and a 409 means
 * another reviewer got there first: the view reloads but the unsaved edit
 * buffer is kept.
 */

import { ApiClient, ApiError } from "./api.js";
import { EditBufferStore } from "./state.js";
import type { ItemView, RepromptRequest } from "./types.js";
import { renderMetrics, renderNav, renderNotice, renderQueue, renderReview } from "./views.js";

export const DEFAULT_POLL_INTERVAL_MS = 10_000;

type Screen =
  | { kind: "queue" }
  | { kind: "review"; itemId: string }
  | { kind: "metrics" };

interface Notice {
  kind: "info" | "error";
  text: string;
}

export interface DashboardOptions {
  courseId?: string;
  pollIntervalMs?: number;
  buffers?: EditBufferStore;
}

export class DashboardApp {
  private screen: Screen = { kind: "queue" };
  private notice: Notice | null = null;
  private item: ItemView | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly buffers: EditBufferStore;
  private readonly courseId?: string;
  private readonly pollIntervalMs: number;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    options: DashboardOptions = {},
  ) {
    this.courseId = options.courseId;
    this.pollIntervalMs = options.pollIntervalMs ?? DEFAULT_POLL_INTERVAL_MS;
    this.buffers = options.buffers ?? new EditBufferStore();
  }

  async start(): Promise<void> {
    await this.refresh();
    this.timer = setInterval(() => {
      void this.refresh();
    }, this.pollIntervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** Re-fetch whatever the current screen shows and re-render. */
  async refresh(): Promise<void> {
    try {
      if (this.screen.kind === "queue") {
        const entries = await this.client.queue(this.courseId);
        this.render(renderNav("queue") + renderNotice(this.notice) + renderQueue(entries));
      } else if (this.screen.kind === "review") {
        this.item = await this.client.item(this.screen.itemId);
        const buffer =
          this.buffers.load(this.item.item_id) ?? latestText(this.item);
        this.render(
          renderNav("review") + renderNotice(this.notice) + renderReview(this.item, buffer),
        );
      } else {
        const metrics = await this.client.metrics(this.courseId);
        this.render(renderNav("metrics") + renderNotice(this.notice) + renderMetrics(metrics));
      }
    } catch (err) {
      this.notice = { kind: "error", text: describe(err) };
      this.render(renderNav(this.screen.kind) + renderNotice(this.notice));
    }
  }

  async openQueue(): Promise<void> {
    this.screen = { kind: "queue" };
    this.item = null;
    await this.refresh();
  }

  async openReview(itemId: string): Promise<void> {
    this.screen = { kind: "review", itemId };
    await this.refresh();
  }

  async openMetrics(): Promise<void> {
    this.screen = { kind: "metrics" };
    await this.refresh();
  }

  // --- actions ---------------------------------------------------------------

  private async submitEdit(): Promise<void> {
    if (!this.item) return;
    const text = this.editText();
    await this.act(async () => {
      await this.client.edit(this.item!.item_id, this.item!.version, text);
      this.buffers.clear(this.item!.item_id);
      this.notice = { kind: "info", text: "Edit saved." };
      await this.refresh();
    });
  }

  private async submitApprove(): Promise<void> {
    if (!this.item) return;
    const itemId = this.item.item_id;
    await this.act(async () => {
      await this.client.approve(itemId, this.item!.version);
      this.buffers.clear(itemId);
      this.notice = { kind: "info", text: "Approved; the answer is being published." };
      await this.openQueue();
    });
  }

  private async submitDismiss(): Promise<void> {
    if (!this.item) return;
    await this.act(async () => {
      await this.client.dismiss(this.item!.item_id, this.item!.version);
      this.buffers.clear(this.item!.item_id);
      this.notice = { kind: "info", text: "Dismissed." };
      await this.openQueue();
    });
  }

  private async submitReprompt(): Promise<void> {
    if (!this.item) return;
    const options = this.repromptOptions();
    await this.act(async () => {
      await this.client.reprompt(this.item!.item_id, this.item!.version, options);
      this.notice = { kind: "info", text: "Reprompt accepted; a new draft will appear shortly." };
      await this.refresh();
    });
  }

  /** Run a mutation; 409 reloads the view and keeps the edit buffer. */
  private async act(mutation: () => Promise<void>): Promise<void> {
    try {
      await mutation();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.notice = {
          kind: "error",
          text: "Someone else acted on this item; the view was reloaded. Your unsaved text is kept.",
        };
      } else {
        this.notice = { kind: "error", text: describe(err) };
      }
      await this.refresh();
    }
  }

  // --- DOM plumbing -------------------------------------------------------------

  private render(html: string): void {
    this.root.innerHTML = html;
    this.bind();
  }

  private bind(): void {
    for (const el of Array.from(this.root.querySelectorAll<HTMLElement>("[data-action]"))) {
      const action = el.dataset.action;
      if (action === "open-item") {
        el.addEventListener("click", () => {
          void this.openReview(el.dataset.itemId ?? "");
        });
      } else if (action === "nav") {
        el.addEventListener("click", () => {
          const screen = el.dataset.screen;
          this.notice = null;
          if (screen === "queue") void this.openQueue();
          else if (screen === "metrics") void this.openMetrics();
        });
      } else if (action === "save-edit") {
        el.addEventListener("click", () => void this.submitEdit());
      } else if (action === "approve") {
        el.addEventListener("click", () => void this.submitApprove());
      } else if (action === "dismiss") {
        el.addEventListener("click", () => void this.submitDismiss());
      } else if (action === "reprompt") {
        el.addEventListener("click", () => void this.submitReprompt());
      }
    }
    const editBox = this.root.querySelector<HTMLTextAreaElement>('[data-testid="edit-text"]');
    if (editBox && this.item) {
      const itemId = this.item.item_id;
      editBox.addEventListener("input", () => {
        this.buffers.save(itemId, editBox.value);
      });
    }
  }

  private editText(): string {
    const editBox = this.root.querySelector<HTMLTextAreaElement>('[data-testid="edit-text"]');
    return editBox ? editBox.value : "";
  }

  private repromptOptions(): RepromptRequest {
    const checked = (testid: string) =>
      this.root.querySelector<HTMLInputElement>(`[data-testid="${testid}"]`)?.checked ?? false;
    const level = this.root.querySelector<HTMLSelectElement>('[data-testid="detail-level"]');
    const custom = this.root.querySelector<HTMLTextAreaElement>(
      '[data-testid="custom-instructions"]',
    );
    const customText = custom?.value.trim() ?? "";
    return {
      preserve_history: checked("preserve-history"),
      code_allowed: checked("code-allowed"),
      detail_level: (level?.value ?? "STANDARD") as RepromptRequest["detail_level"],
      custom_instructions: customText ? customText : null,
    };
  }
}

function latestText(item: ItemView): string {
  const draft = item.drafts[item.drafts.length - 1];
  if (!draft) return "";
  return draft.edited_output ?? draft.raw_output;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.status || "network"}: ${err.message}`;
  }
  return String(err);
}
