// Typed client for the suggestion service. All calls go through plain
// fetch so tests can stub the transport.

export interface SuggestRequest {
  observation: string[];
  m: number;
  iterations?: number;
  delta?: number;
  seed?: number;
}

export interface Suggestion {
  action: string;
  weight: number;
}

export interface HoleSuggestions {
  position: number;
  suggestions: Suggestion[];
}

export interface SuggestResponse {
  holes: HoleSuggestions[];
  completed: string[];
  objective: number;
  model_id: string;
}

export interface VocabResponse {
  tokens: string[];
  counts: number[];
}

export interface HealthResponse {
  status: string;
  model_id: string;
  dim: number;
  window: number;
  vocab_size: number;
}

/** HTTP-level failure with the service's error detail attached. */
export class ApiError extends Error {
  status: number;
  unknownActions: string[];

  constructor(status: number, message: string, unknownActions: string[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.unknownActions = unknownActions;
  }
}

function detailMessage(detail: unknown): string {
  if (typeof detail === "string") {
    return detail;
  }
  if (detail && typeof detail === "object" && "message" in detail) {
    return String((detail as { message: unknown }).message);
  }
  return JSON.stringify(detail);
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) {
    return;
  }
  let detail: unknown = response.statusText;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (body && body.detail !== undefined) {
      detail = body.detail;
    }
  } catch {
    // non-JSON error body, keep the status text
  }
  const unknown =
    detail && typeof detail === "object" && "unknown_actions" in detail
      ? ((detail as { unknown_actions: unknown }).unknown_actions as string[])
      : [];
  throw new ApiError(response.status, detailMessage(detail), unknown);
}

export class ServiceClient {
  constructor(private baseUrl: string = "") {}

  async health(): Promise<HealthResponse> {
    const response = await fetch(`${this.baseUrl}/api/health`);
    await raiseForStatus(response);
    return (await response.json()) as HealthResponse;
  }

  async vocab(): Promise<VocabResponse> {
    const response = await fetch(`${this.baseUrl}/api/vocab`);
    await raiseForStatus(response);
    return (await response.json()) as VocabResponse;
  }

  async suggest(
    request: SuggestRequest,
    signal?: AbortSignal,
  ): Promise<SuggestResponse> {
    const response = await fetch(`${this.baseUrl}/api/suggest`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
      signal,
    });
    await raiseForStatus(response);
    return (await response.json()) as SuggestResponse;
  }
}
