// Client for the documented vidrag endpoints: POST /v1/query, GET /v1/tools.

import { QueryRequest, QueryResponse, ToolInfo } from "./types";

declare global {
  interface Window {
    VIDRAG_API_BASE?: string;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  status: number | null;
  field: string | null;

  constructor(message: string, status: number | null = null, field: string | null = null) {
    super(message);
    this.status = status;
    this.field = field;
  }
}

// Runtime-configurable base URL; empty string means same origin.
export function apiBase(): string {
  if (typeof window !== "undefined" && window.VIDRAG_API_BASE) {
    return window.VIDRAG_API_BASE.replace(/\/$/, "");
  }
  return "";
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `request failed: ${response.status}`;
  let field: string | null = null;
  try {
    const body = await response.json();
    if (body?.error?.message) {
      message = body.error.message;
      field = body.error.field ?? null;
    }
  } catch {
    // non-JSON error body: keep the status message
  }
  return new ApiError(message, response.status, field);
}

export async function postQuery(
  request: QueryRequest,
  fetchFn: FetchLike = fetch,
): Promise<QueryResponse> {
  let response: Response;
  try {
    response = await fetchFn(`${apiBase()}/v1/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
  } catch (err) {
    throw new ApiError(`service unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    throw await errorFrom(response);
  }
  return (await response.json()) as QueryResponse;
}

export async function getTools(fetchFn: FetchLike = fetch): Promise<ToolInfo[]> {
  let response: Response;
  try {
    response = await fetchFn(`${apiBase()}/v1/tools`);
  } catch (err) {
    throw new ApiError(`service unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    throw await errorFrom(response);
  }
  const body = await response.json();
  return (body?.tools ?? []) as ToolInfo[];
}
