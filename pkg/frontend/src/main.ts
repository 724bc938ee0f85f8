/** Entry point: wires the store and renderers to the page. */

import { createApi } from "./api";
import { ReviewStore } from "./store";
import type { EntityResponse, ReviewStatus } from "./types";
import { renderErrorBanner, renderEvidencePanel, renderQueue } from "./ui";

const API_URL = (window as { ARCHLINK_API?: string }).ARCHLINK_API ?? "http://127.0.0.1:8040";
const REVIEWER = (window as { ARCHLINK_REVIEWER?: string }).ARCHLINK_REVIEWER ?? "cataloguer";

const api = createApi({ baseUrl: API_URL });
const store = new ReviewStore(api, REVIEWER);

const entityCache = new Map<string, EntityResponse>();
let activeTab: ReviewStatus = "pending";
let entityFilter = "";
let selected: string | null = null;

async function entity(id: string): Promise<EntityResponse> {
  const cached = entityCache.get(id);
  if (cached) return cached;
  const fetched = await api.fetchEntity(id);
  entityCache.set(id, fetched);
  return fetched;
}

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function renderAll(): void {
  const state = store.getState();
  el("banner").innerHTML = renderErrorBanner(state.error);
  el("queue").innerHTML = state.loaded
    ? renderQueue(state.items, { status: activeTab, entityFilter: entityFilter || undefined })
    : "<p class='empty'>loading…</p>";
  for (const tab of ["pending", "accepted", "rejected"] as ReviewStatus[]) {
    const count = state.items.filter((i) => i.status === tab).length;
    el(`tab-${tab}`).textContent = `${tab} (${count})`;
    el(`tab-${tab}`).classList.toggle("active", tab === activeTab);
  }
}

async function showEvidence(recId: string): Promise<void> {
  const item = store.item(recId);
  if (!item) return;
  selected = recId;
  const labels = new Map<string, string>();
  item.pair.forEach((id, i) => labels.set(id, item.pair_labels[i]));
  const hosts: EntityResponse[] = [];
  for (const ev of item.evidence) {
    for (const id of ev.entities) {
      try {
        const ent = await entity(id);
        labels.set(id, ent.label);
        if (ev.type === "bio_mention" || ev.type === "arch_mention") {
          if (ev.type === "arch_mention") {
            // archive evidence names the historians; snippets live on their collections
            for (const stmt of ent.statements) {
              if (stmt.predicate === "produced" && stmt.subject === ent.id) {
                hosts.push(await entity(stmt.object));
              }
            }
          }
          hosts.push(ent);
        }
      } catch {
        // evidence chips degrade to raw ids when a lookup fails
      }
    }
  }
  el("panel").innerHTML = renderEvidencePanel(item, { labels, hosts });
}

function wireEvents(): void {
  el("queue").addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-action]") as HTMLElement | null;
    if (!target) return;
    const recId = target.dataset.rec as string;
    const action = target.dataset.action;
    if (action === "accept" || action === "reject") {
      void store.decide(recId, action);
    } else if (action === "inspect") {
      void showEvidence(recId);
    }
  });
  for (const tab of ["pending", "accepted", "rejected"] as ReviewStatus[]) {
    el(`tab-${tab}`).addEventListener("click", () => {
      activeTab = tab;
      renderAll();
    });
  }
  const filter = el("filter") as HTMLInputElement;
  filter.addEventListener("input", () => {
    entityFilter = filter.value.trim();
    renderAll();
  });
  el("reload").addEventListener("click", () => void store.load());
}

store.subscribe(() => {
  renderAll();
  if (selected && !store.item(selected)) {
    el("panel").innerHTML = "";
    selected = null;
  }
});

wireEvents();
void store.load();
