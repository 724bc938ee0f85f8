/** Client-side review state.
 *
 * The store is a cache of server truth: every status it holds is
 * reproducible by refetching the API. Submissions update the item
 * optimistically and reconcile with (or revert to) the server's answer.
 */

import type { ApiClient } from "./api";
import { newRequestId } from "./api";
import type { ReviewItem, ReviewStatus, Verdict } from "./types";

export interface ReviewState {
  items: ReviewItem[];
  /** last error banner text; null when the last API call succeeded */
  error: string | null;
  loaded: boolean;
}

export type Listener = (state: ReviewState) => void;

export class ReviewStore {
  private state: ReviewState = { items: [], error: null, loaded: false };
  private listeners: Listener[] = [];
  /** request id per recommendation, stable across retries and double clicks */
  private requestIds = new Map<string, string>();
  private inFlight = new Set<string>();

  constructor(
    private api: ApiClient,
    private reviewer: string,
  ) {}

  getState(): ReviewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private setState(patch: Partial<ReviewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Load the queue; on failure keep the last good list and raise a banner. */
  async load(entity?: string): Promise<void> {
    try {
      const body = await this.api.fetchQueue(entity);
      this.setState({ items: body.items, error: null, loaded: true });
    } catch (err) {
      this.setState({ error: describe(err) });
    }
  }

  item(recId: string): ReviewItem | undefined {
    return this.state.items.find((i) => i.id === recId);
  }

  private patchStatus(recId: string, status: ReviewStatus): void {
    this.setState({
      items: this.state.items.map((i) => (i.id === recId ? { ...i, status } : i)),
    });
  }

  /** Accept or reject one pending item.
   *
   * No decision is ever sent without this explicit call. A second call for
   * the same item while one is in flight is ignored; retries and repeated
   * clicks reuse the item's request id, so the server records one decision.
   */
  async decide(recId: string, verdict: Verdict): Promise<void> {
    const item = this.item(recId);
    if (!item || item.status !== "pending" || this.inFlight.has(recId)) return;
    let requestId = this.requestIds.get(recId);
    if (!requestId) {
      requestId = newRequestId();
      this.requestIds.set(recId, requestId);
    }
    const optimistic: ReviewStatus = verdict === "accept" ? "accepted" : "rejected";
    this.patchStatus(recId, optimistic);
    this.inFlight.add(recId);
    try {
      const response = await this.api.submitDecision(recId, verdict, this.reviewer, requestId);
      this.patchStatus(recId, response.status);
      this.requestIds.delete(recId);
      this.setState({ error: null });
    } catch (err) {
      // revert: the item stays pending with a retry affordance
      this.patchStatus(recId, "pending");
      this.setState({ error: describe(err) });
    } finally {
      this.inFlight.delete(recId);
    }
  }
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
