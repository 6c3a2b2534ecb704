/** Payload shapes of the review API (see the service README). */

export interface QueueEntry {
  item_id: string;
  course_id: string;
  title: string;
  waiting_since: string;
  draft_preview: string;
  version: number;
}

export interface PostView {
  post_id: string;
  thread_id: string;
  course_id: string;
  title: string;
  body: string;
  author_label: string;
  created_at: string;
  category: string | null;
  answered: boolean;
}

export interface DraftView {
  index: number;
  raw_output: string;
  edited_output: string | null;
  model_id: string;
  latency_ms: number;
  created_at: string;
  prompt_record: { text: string };
}

export interface ActionView {
  actor_id: string;
  kind: "APPROVE" | "EDIT" | "REPROMPT" | "DISMISS";
  at: string;
  draft_index: number | null;
  note: string | null;
  edit_payload: { text: string; distance: number } | null;
  reprompt_payload: RepromptRequest | null;
}

export interface ItemView {
  item_id: string;
  course_id: string;
  state: string;
  version: number;
  attempts: number;
  post: PostView;
  drafts: DraftView[];
  actions: ActionView[];
}

export type DetailLevel = "CONCISE" | "STANDARD" | "DETAILED";

export interface RepromptRequest {
  preserve_history: boolean;
  code_allowed: boolean;
  detail_level: DetailLevel;
  custom_instructions: string | null;
}

export interface MetricsView {
  course_id: string | null;
  items_total: number;
  approved_unedited: number;
  edited: number;
  dismissed: number;
  pending: number;
  reprompt_histogram: Record<string, number>;
  mean_edit_distance: number;
  mean_drafts_per_item: number;
}
