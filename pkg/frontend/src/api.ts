/**
 * Typed client for the review API.
 *
 * Every call carries the reviewer's bearer token; mutations carry the
 * version the caller last saw as If-Match. Non-2xx responses become
 * ApiError with the server's error code, so views can branch on 409
 * (someone else acted first) versus everything else.
 */

import type { ItemView, MetricsView, QueueEntry, RepromptRequest } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface RequestOptions {
  method?: string;
  body?: unknown;
  version?: number;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  async queue(courseId?: string): Promise<QueueEntry[]> {
    const query = courseId ? `?course_id=${encodeURIComponent(courseId)}` : "";
    const data = await this.request<{ items: QueueEntry[] }>(`/api/queue${query}`);
    return data.items;
  }

  item(itemId: string): Promise<ItemView> {
    return this.request(`/api/items/${encodeURIComponent(itemId)}`);
  }

  metrics(courseId?: string): Promise<MetricsView> {
    const query = courseId ? `?course_id=${encodeURIComponent(courseId)}` : "";
    return this.request(`/api/metrics${query}`);
  }

  sync(courseId: string): Promise<{ created: string[] }> {
    return this.request(`/api/sync?course_id=${encodeURIComponent(courseId)}`, {
      method: "POST",
    });
  }

  approve(itemId: string, version: number, note?: string): Promise<ItemView> {
    return this.request(`/api/items/${encodeURIComponent(itemId)}/approve`, {
      method: "POST",
      version,
      body: note ? { note } : {},
    });
  }

  edit(itemId: string, version: number, text: string, note?: string): Promise<ItemView> {
    return this.request(`/api/items/${encodeURIComponent(itemId)}/edit`, {
      method: "POST",
      version,
      body: { text, note: note ?? null },
    });
  }

  reprompt(itemId: string, version: number, options: RepromptRequest): Promise<ItemView> {
    return this.request(`/api/items/${encodeURIComponent(itemId)}/reprompt`, {
      method: "POST",
      version,
      body: options,
    });
  }

  dismiss(itemId: string, version: number, note?: string): Promise<ItemView> {
    return this.request(`/api/items/${encodeURIComponent(itemId)}/dismiss`, {
      method: "POST",
      version,
      body: note ? { note } : {},
    });
  }

  private async request<T>(path: string, options: RequestOptions = {}): Promise<T> {
    const headers: Record<string, string> = {
      Authorization: `Bearer ${this.token}`,
    };
    if (options.version !== undefined) {
      headers["If-Match"] = String(options.version);
    }
    const init: RequestInit = { method: options.method ?? "GET", headers };
    if (options.body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(options.body);
    }

    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, "unreachable", `cannot reach ${this.baseUrl}: ${String(err)}`);
    }
    if (!response.ok) {
      let code = "error";
      let message = `${response.status}`;
      try {
        const body = (await response.json()) as { error?: string; message?: string };
        code = body.error ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }
}
