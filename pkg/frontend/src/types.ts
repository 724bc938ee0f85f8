/** Payload shapes of the review service API. The UI never invents fields
 * that are not in these payloads; domain truth lives on the server. */

export type Verdict = "accept" | "reject";
export type ReviewStatus = "pending" | "accepted" | "rejected";

export interface Evidence {
  type: "bio_mention" | "arch_mention" | "shared_topic" | "shared_institution";
  entities: string[];
}

export interface ReviewItem {
  id: string;
  pair: [string, string];
  pair_labels: [string, string];
  predicate: string;
  score: number;
  source: string; // "rule:R1_bio_mention" | "model:nb/inst" | ...
  known: 0 | 1;
  evidence: Evidence[];
  status: ReviewStatus;
}

export interface QueueResponse {
  items: ReviewItem[];
  count: number;
}

export interface DecisionResponse {
  recorded: boolean;
  rec_id: string;
  status: ReviewStatus;
}

export interface EntityResponse {
  id: string;
  kind: string;
  label: string;
  aliases: string[];
  external_id: string | null;
  statements: {
    subject: string;
    predicate: string;
    object: string;
    graph: string;
    source: string;
  }[];
  texts: { biography?: string; description?: string };
}

export function isRuleSourced(item: ReviewItem): boolean {
  return item.source.startsWith("rule:");
}
