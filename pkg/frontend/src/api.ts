// Typed client for the triage service HTTP API. The fetch implementation
// is injectable so tests can run against a stub or a live server alike.

import type {
  Assessment,
  ClientEventKind,
  FeedbackAck,
  GraphPayload,
  Metric,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

/** A metric override lost the compare-and-set race; `current` is the value now in effect. */
export class ConflictError extends ApiError {
  constructor(
    message: string,
    readonly current: string,
  ) {
    super(message, 409);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class TriageApi {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json().catch(() => ({}));
    if (response.status === 409) {
      throw new ConflictError(body.error ?? "conflict", body.current ?? "");
    }
    if (!response.ok) {
      throw new ApiError(body.error ?? `request failed: ${response.status}`, response.status);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown, method = "POST"): Promise<T> {
    return this.request<T>(path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  async session(): Promise<string> {
    const body = await this.request<{ session: string }>("/api/session");
    return body.session;
  }

  graph(): Promise<GraphPayload> {
    return this.request<GraphPayload>("/api/graph");
  }

  assessment(fn: string): Promise<Assessment> {
    return this.request<Assessment>(`/api/assessment/${encodeURIComponent(fn)}`);
  }

  /** Submit one metric override; resolves to the server-recomputed assessment. */
  override(
    fn: string,
    metric: Metric,
    oldValue: string,
    newValue: string,
    actor: string,
  ): Promise<Assessment> {
    return this.post<Assessment>(
      `/api/assessment/${encodeURIComponent(fn)}/metric`,
      { metric, old_value: oldValue, new_value: newValue, actor },
      "PUT",
    );
  }

  feedback(
    functions: string[],
    text: string,
    actor: string,
    contact?: { name: string; email: string },
  ): Promise<FeedbackAck> {
    const payload: Record<string, unknown> = { functions, text, actor };
    if (contact && (contact.name || contact.email)) {
      payload.contact = contact;
    }
    return this.post<FeedbackAck>("/api/feedback", payload);
  }

  event(kind: ClientEventKind, fn: string | null, actor: string): Promise<void> {
    return this.post<void>("/api/event", { kind, function: fn, actor });
  }
}
