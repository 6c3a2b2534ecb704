/**
 * HTML rendering for the three screens. Pure functions from API payloads to
 * markup; all interactive elements carry data-action attributes that the
 * controller wires up after each render.
 */

import type { DraftView, ItemView, MetricsView, QueueEntry } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderNotice(notice: { kind: "info" | "error"; text: string } | null): string {
  if (!notice) return "";
  return `<div class="notice notice-${notice.kind}" data-testid="notice">${escapeHtml(notice.text)}</div>`;
}

export function renderNav(active: "queue" | "review" | "metrics"): string {
  const link = (screen: string, label: string) =>
    `<button data-action="nav" data-screen="${screen}" class="${active === screen ? "active" : ""}">${label}</button>`;
  return `<nav>${link("queue", "Queue")}${link("metrics", "Metrics")}</nav>`;
}

export function renderQueue(entries: QueueEntry[]): string {
  if (entries.length === 0) {
    return `<section data-testid="queue"><p>No drafts waiting for review.</p></section>`;
  }
  const rows = entries
    .map(
      (entry) => `
      <tr data-action="open-item" data-item-id="${escapeHtml(entry.item_id)}" data-version="${entry.version}">
        <td class="queue-title">${escapeHtml(entry.title)}</td>
        <td>${escapeHtml(entry.course_id)}</td>
        <td>${escapeHtml(entry.waiting_since)}</td>
        <td class="queue-preview">${escapeHtml(entry.draft_preview)}</td>
      </tr>`,
    )
    .join("");
  return `
    <section data-testid="queue">
      <table>
        <thead><tr><th>Question</th><th>Course</th><th>Waiting since</th><th>Draft preview</th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
    </section>`;
}

function renderDraft(draft: DraftView, isLatest: boolean): string {
  const edited =
    draft.edited_output !== null
      ? `<div class="draft-edited"><em>edited:</em> ${escapeHtml(draft.edited_output)}</div>`
      : "";
  return `
    <article class="draft ${isLatest ? "draft-latest" : ""}" data-testid="draft-${draft.index}">
      <header>Draft #${draft.index + 1} <span class="model">${escapeHtml(draft.model_id)}</span></header>
      <div class="draft-raw">${escapeHtml(draft.raw_output)}</div>
      ${edited}
    </article>`;
}

export function renderReview(item: ItemView, bufferText: string): string {
  const reviewable = item.state === "AWAITING_REVIEW";
  const drafts = item.drafts
    .map((draft, i) => renderDraft(draft, i === item.drafts.length - 1))
    .join("");

  const controls = reviewable
    ? `
    <div class="editor">
      <label for="edit-text">Response text</label>
      <textarea id="edit-text" data-testid="edit-text" rows="8">${escapeHtml(bufferText)}</textarea>
      <button data-action="save-edit">Save edit</button>
    </div>
    <fieldset class="reprompt-panel" data-testid="reprompt-panel">
      <legend>Reprompt</legend>
      <label><input type="checkbox" data-testid="preserve-history"> Preserve draft history</label>
      <label><input type="checkbox" data-testid="code-allowed" checked> Allow code in the response</label>
      <label>Detail level
        <select data-testid="detail-level">
          <option value="CONCISE">Concise</option>
          <option value="STANDARD" selected>Standard</option>
          <option value="DETAILED">Detailed</option>
        </select>
      </label>
      <label>Custom instructions
        <textarea data-testid="custom-instructions" rows="2"></textarea>
      </label>
      <button data-action="reprompt">Reprompt</button>
    </fieldset>
    <div class="decisions">
      <button data-action="approve" data-testid="approve">Approve</button>
      <button data-action="dismiss" data-testid="dismiss">Dismiss</button>
    </div>`
    : `<p class="no-actions">No review actions available in state ${escapeHtml(item.state)}.</p>`;

  return `
    <section data-testid="review" data-item-id="${escapeHtml(item.item_id)}" data-version="${item.version}">
      <button data-action="nav" data-screen="queue">&larr; Back to queue</button>
      <h2>${escapeHtml(item.post.title)}</h2>
      <p class="meta">${escapeHtml(item.post.author_label)} &middot; ${escapeHtml(item.post.created_at)}
        &middot; <span data-testid="item-state">${escapeHtml(item.state)}</span></p>
      <blockquote class="question">${escapeHtml(item.post.body)}</blockquote>
      <div class="drafts">${drafts}</div>
      ${controls}
    </section>`;
}

export function renderMetrics(metrics: MetricsView): string {
  const histogram = Object.entries(metrics.reprompt_histogram)
    .sort(([a], [b]) => Number(a) - Number(b))
    .map(
      ([reprompts, items]) =>
        `<tr><td>${escapeHtml(reprompts)}</td><td data-testid="hist-${escapeHtml(reprompts)}">${items}</td></tr>`,
    )
    .join("");
  return `
    <section data-testid="metrics">
      <h2>Interventions${metrics.course_id ? ` — ${escapeHtml(metrics.course_id)}` : ""}</h2>
      <dl>
        <dt>Items</dt><dd data-testid="items-total">${metrics.items_total}</dd>
        <dt>Approved unedited</dt><dd data-testid="approved-unedited">${metrics.approved_unedited}</dd>
        <dt>Edited</dt><dd data-testid="edited">${metrics.edited}</dd>
        <dt>Dismissed</dt><dd data-testid="dismissed">${metrics.dismissed}</dd>
        <dt>Pending</dt><dd data-testid="pending">${metrics.pending}</dd>
        <dt>Mean edit distance</dt><dd>${metrics.mean_edit_distance.toFixed(4)}</dd>
        <dt>Mean drafts per item</dt><dd>${metrics.mean_drafts_per_item.toFixed(4)}</dd>
      </dl>
      <h3>Reprompts per item</h3>
      <table><thead><tr><th>Reprompts</th><th>Items</th></tr></thead><tbody>${histogram}</tbody></table>
    </section>`;
}
