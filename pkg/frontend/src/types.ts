// Wire types for the vidrag query service.

export interface Citation {
  video_id: string;
  title: string;
  start_ms: number;
  end_ms: number;
  deep_link_url: string;
  quoted_text: string;
}

export interface RetrievedDoc {
  video_id: string;
  score: number;
  entry_id: string;
}

export interface HowToPayload {
  title: string;
  steps: string[];
}

export interface PlacePayload {
  name: string;
  description: string;
  why_notable: string;
}

export interface GeneralPayload {
  answer: string;
}

export type AnswerPayload = HowToPayload | PlacePayload | GeneralPayload;

export interface QueryRequest {
  query: string;
  tool?: string;
  k?: number;
}

export interface QueryResponse {
  answer_type: string; // "how_to" | "place" | "general" (unknown values tolerated)
  tool: string;
  payload: Record<string, unknown>;
  citations: Citation[];
  retrieved: RetrievedDoc[];
}

export interface ToolInfo {
  tool_id: string;
  description: string;
  video_count: number;
}

export type TurnStatus = "pending" | "ok" | "error";

export interface ChatTurn {
  id: number;
  query: string;
  tool: string; // "" means auto (server-side routing)
  status: TurnStatus;
  response?: QueryResponse;
  error?: string;
  timestamp: number;
}
