import type { DashboardState, PrioritizedItemPayload } from "./types.js";

/**
 * Pure rendering: state in, HTML string out. Rows appear exactly in API
 * response order — the dashboard never re-sorts — with separator rows where
 * the merge-conflict group or the change-type group changes.
 */

const TYPE_LABELS: Record<PrioritizedItemPayload["change_type"], string> = {
  TroubleReport: "trouble report",
  Feature: "feature",
  Refactoring: "refactoring",
};

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderDashboard(state: DashboardState, reviewUrlBase = ""): string {
  switch (state.phase) {
    case "idle":
      return renderIdle(state.modelInfo?.model ?? null);
    case "loading":
      return `<p class="status loading">loading open review requests for ${escapeHtml(state.user)}…</p>`;
    case "error":
      return renderError(state.user, state.error.message, state.error.retryable);
    case "loaded":
      return renderLoaded(state, reviewUrlBase);
  }
}

function renderIdle(model: { trained_at: string; training_rows: number } | null): string {
  const line = model
    ? `model trained ${escapeHtml(model.trained_at)} on ${model.training_rows} changes`
    : "no model trained yet";
  return `<p class="status idle">enter a user id to rank open review requests · ${line}</p>`;
}

function renderError(user: string, message: string, retryable: boolean): string {
  const retry = retryable
    ? ' <button type="button" class="retry" data-action="refresh">retry</button>'
    : "";
  return (
    `<div class="banner error" role="alert">` +
    `could not load requests for ${escapeHtml(user)}: ${escapeHtml(message)}.${retry}` +
    `</div>`
  );
}

function renderLoaded(
  state: Extract<DashboardState, { phase: "loaded" }>,
  reviewUrlBase: string,
): string {
  const { user, model_trained_at, items } = state.response;
  const banner =
    `<div class="banner model">ranked for ${escapeHtml(user)} · ` +
    `model trained ${escapeHtml(model_trained_at)} · ` +
    `<button type="button" class="refresh" data-action="refresh">refresh</button></div>`;
  if (items.length === 0) {
    return banner + `<p class="status empty">no open review requests</p>`;
  }
  const rows: string[] = [];
  let previous: PrioritizedItemPayload | null = null;
  for (const item of items) {
    if (previous === null || previous.merge_conflict !== item.merge_conflict) {
      const label = item.merge_conflict === "Yes" ? "merge conflicts" : "no merge conflicts";
      rows.push(`<tr class="separator conflict"><td colspan="5">${label}</td></tr>`);
      previous = null; // a conflict boundary is also a type boundary
    }
    if (previous === null || previous.change_type !== item.change_type) {
      rows.push(
        `<tr class="separator type"><td colspan="5">${TYPE_LABELS[item.change_type]}s</td></tr>`,
      );
    }
    rows.push(renderRow(item, reviewUrlBase));
    previous = item;
  }
  return (
    banner +
    `<table class="requests"><thead><tr>` +
    `<th>rank</th><th>subject</th><th>type</th><th>status</th><th>merge probability</th>` +
    `</tr></thead><tbody>${rows.join("")}</tbody></table>`
  );
}

function renderRow(item: PrioritizedItemPayload, reviewUrlBase: string): string {
  const subject = reviewUrlBase
    ? `<a href="${escapeHtml(reviewUrlBase)}/q/${encodeURIComponent(item.change_id)}">` +
      `${escapeHtml(item.subject)}</a>`
    : escapeHtml(item.subject);
  const conflictBadge =
    item.merge_conflict === "Yes"
      ? `<span class="badge conflict">conflict</span>`
      : `<span class="badge clean">clean</span>`;
  const typeClass = item.change_type.toLowerCase();
  const probability = item.merge_probability.toFixed(3);
  const estimated = item.degraded ? ` <span class="badge estimated">estimated</span>` : "";
  return (
    `<tr class="request" data-change-id="${escapeHtml(item.change_id)}">` +
    `<td class="rank">${item.rank}</td>` +
    `<td class="subject">${subject}</td>` +
    `<td><span class="badge type ${typeClass}">${TYPE_LABELS[item.change_type]}</span></td>` +
    `<td>${conflictBadge}</td>` +
    `<td class="probability">${probability}${estimated}</td>` +
    `</tr>`
  );
}
