/** HTML renderers for the review queue and the evidence panel.
 *
 * Pure string producers so they are testable without a DOM; main.ts binds
 * them to the document. Evidence comes first in the panel layout: reviewers
 * confirm from the material, then press a verdict button.
 */

import type { EntityResponse, Evidence, ReviewItem, ReviewStatus } from "./types";
import { isRuleSourced } from "./types";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface QueueOptions {
  /** show only pairs involving this entity id */
  entityFilter?: string;
  status?: ReviewStatus;
}

export function visibleItems(items: ReviewItem[], options: QueueOptions = {}): ReviewItem[] {
  let out = items;
  if (options.entityFilter) {
    out = out.filter((i) => i.pair.includes(options.entityFilter as string));
  }
  if (options.status) {
    out = out.filter((i) => i.status === options.status);
  }
  // score descending; ties keep the server's canonical pair order
  return [...out].sort((a, b) => b.score - a.score);
}

export function renderErrorBanner(error: string | null): string {
  if (!error) return "";
  return `<div class="banner error" role="alert">service unreachable: ${escapeHtml(
    error,
  )} — showing the last loaded queue</div>`;
}

export function renderSourceBadge(item: ReviewItem): string {
  const cls = isRuleSourced(item) ? "badge rule" : "badge model";
  const label = item.source.replace(/^(rule|model):/, "");
  const kind = isRuleSourced(item) ? "rule" : "model";
  return `<span class="${cls}" title="${escapeHtml(item.source)}">${kind}: ${escapeHtml(label)}</span>`;
}

export function renderKnownBadge(item: ReviewItem): string {
  return item.known
    ? `<span class="badge known">known</span>`
    : `<span class="badge unknown" title="not recorded in any biography">unknown — not recorded in any biography</span>`;
}

export function renderQueueRow(item: ReviewItem): string {
  const [a, b] = item.pair_labels;
  const buttons =
    item.status === "pending"
      ? `<button data-action="accept" data-rec="${item.id}">accept</button>
         <button data-action="reject" data-rec="${item.id}">reject</button>`
      : `<span class="status ${item.status}">${item.status}</span>`;
  return `<tr class="item ${item.status}" data-rec="${item.id}">
    <td><span class="badge score">${item.score.toFixed(2)}</span></td>
    <td class="pair" data-action="inspect" data-rec="${item.id}">
      ${escapeHtml(a)} &harr; ${escapeHtml(b)}
      <span class="predicate">${escapeHtml(item.predicate.replace(/_/g, " "))}</span>
    </td>
    <td>${renderSourceBadge(item)} ${renderKnownBadge(item)}</td>
    <td class="actions">${buttons}</td>
  </tr>`;
}

export function renderQueue(items: ReviewItem[], options: QueueOptions = {}): string {
  const visible = visibleItems(items, options);
  if (visible.length === 0) {
    return `<p class="empty">no items</p>`;
  }
  return `<table class="queue">
    <thead><tr><th>score</th><th>pair</th><th>origin</th><th></th></tr></thead>
    <tbody>${visible.map(renderQueueRow).join("\n")}</tbody>
  </table>`;
}

/** Highlight every occurrence of the given surfaces in a text snippet. */
export function highlight(text: string, surfaces: string[]): string {
  let html = escapeHtml(text);
  for (const surface of surfaces) {
    if (!surface) continue;
    const escaped = escapeHtml(surface).replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
    html = html.replace(new RegExp(escaped, "g"), `<mark>${escapeHtml(surface)}</mark>`);
  }
  return html;
}

function chips(label: string, entities: string[], labels: Map<string, string>): string {
  const rendered = entities
    .map((e) => `<span class="chip">${escapeHtml(labels.get(e) ?? e)}</span>`)
    .join(" ");
  return `<div class="chips"><span class="chips-label">${label}:</span> ${rendered}</div>`;
}

export interface EvidenceContext {
  /** entity id -> label, for chip rendering */
  labels: Map<string, string>;
  /** texts of the pair's entities, fetched on demand */
  hosts: EntityResponse[];
}

export function renderEvidencePanel(item: ReviewItem, context: EvidenceContext): string {
  const parts: string[] = [
    `<h2>${escapeHtml(item.pair_labels[0])} &harr; ${escapeHtml(item.pair_labels[1])}</h2>`,
    `<p>${renderSourceBadge(item)} ${renderKnownBadge(item)} <span class="badge score">score ${item.score.toFixed(2)}</span></p>`,
  ];
  for (const ev of item.evidence) {
    if (ev.type === "shared_topic") {
      parts.push(chips("shared topics", ev.entities, context.labels));
    } else if (ev.type === "shared_institution") {
      parts.push(chips("shared institutions", ev.entities, context.labels));
    } else {
      parts.push(...mentionSnippets(item, ev, context));
    }
  }
  if (item.evidence.length === 0) {
    parts.push(`<p class="empty">no evidence attached</p>`);
  }
  return `<section class="evidence">${parts.join("\n")}</section>`;
}

function mentionSnippets(item: ReviewItem, ev: Evidence, context: EvidenceContext): string[] {
  const field = ev.type === "bio_mention" ? "biography" : "description";
  const surfaces = [...context.labels.values()];
  const snippets: string[] = [];
  for (const host of context.hosts) {
    const text = field === "biography" ? host.texts.biography : host.texts.description;
    if (!text) continue;
    const counterpart = item.pair.find((p) => p !== host.id);
    const counterpartLabel = counterpart ? context.labels.get(counterpart) : undefined;
    if (counterpartLabel && !text.includes(counterpartLabel)) continue;
    snippets.push(
      `<blockquote class="snippet"><cite>${escapeHtml(host.label)} — ${field}</cite>
       ${highlight(text, counterpartLabel ? [counterpartLabel] : surfaces)}</blockquote>`,
    );
  }
  if (snippets.length === 0) {
    snippets.push(
      `<p class="snippet-missing">${ev.type === "bio_mention" ? "biography" : "archive"} mention recorded in the catalogue columns</p>`,
    );
  }
  return snippets;
}
