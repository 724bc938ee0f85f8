/** Typed client for the review service.
 *
 * Decisions are the only mutation. Each decision carries a client-generated
 * request id; the server deduplicates on it, so retrying a failed or
 * uncertain submission with the SAME id can never double-record.
 */

import type { DecisionResponse, EntityResponse, QueueResponse, Verdict } from "./types";

export interface ApiClient {
  fetchQueue(entity?: string): Promise<QueueResponse>;
  fetchEntity(id: string): Promise<EntityResponse>;
  submitDecision(
    recId: string,
    verdict: Verdict,
    reviewer: string,
    requestId: string,
  ): Promise<DecisionResponse>;
}

export interface ApiOptions {
  baseUrl: string;
  fetchFn?: typeof fetch;
  /** retries for submitDecision on network failure (same request id) */
  retries?: number;
  retryDelayMs?: number;
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly code: string | null = null,
  ) {
    super(message);
  }
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export function newRequestId(): string {
  return `ui-${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;
}

export function createApi(options: ApiOptions): ApiClient {
  const fetchFn = options.fetchFn ?? fetch;
  const retries = options.retries ?? 2;
  const retryDelayMs = options.retryDelayMs ?? 250;
  const base = options.baseUrl.replace(/\/$/, "");

  async function parse<T>(res: Response): Promise<T> {
    if (!res.ok) {
      let code: string | null = null;
      let message = `HTTP ${res.status}`;
      try {
        const body = (await res.json()) as { code?: string; message?: string };
        code = body.code ?? null;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the status message
      }
      throw new ApiError(message, res.status, code);
    }
    return res.json() as Promise<T>;
  }

  return {
    async fetchQueue(entity?: string): Promise<QueueResponse> {
      const params = new URLSearchParams();
      if (entity) params.set("entity", entity);
      const query = params.toString();
      const res = await fetchFn(`${base}/recommendations${query ? `?${query}` : ""}`);
      return parse<QueueResponse>(res);
    },

    async fetchEntity(id: string): Promise<EntityResponse> {
      const res = await fetchFn(`${base}/entities/${encodeURIComponent(id)}`);
      return parse<EntityResponse>(res);
    },

    async submitDecision(recId, verdict, reviewer, requestId): Promise<DecisionResponse> {
      let lastError: unknown;
      for (let attempt = 0; attempt <= retries; attempt++) {
        try {
          const res = await fetchFn(`${base}/decisions`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({
              rec_id: recId,
              verdict,
              reviewer,
              request_id: requestId, // identical across retries: idempotent
            }),
          });
          return await parse<DecisionResponse>(res);
        } catch (err) {
          if (err instanceof ApiError) throw err; // server answered: do not retry
          lastError = err;
          if (attempt < retries) await sleep(retryDelayMs * (attempt + 1));
        }
      }
      throw lastError instanceof Error ? lastError : new Error("network failure");
    },
  };
}
