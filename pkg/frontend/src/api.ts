// Thin typed client over the service API. fetch is injectable so the
// view-model tests can run without a server.

import type {
  CheckReport,
  DisclosureEdit,
  DocumentResponse,
  TracePayload,
  TrackPayload,
  TrackType,
  WidgetEntry,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const message = (body as { error?: string }).error ?? response.statusText;
    throw new ApiError(response.status, message);
  }
  return body as T;
}

// The surface the view-model depends on; tests substitute fakes.
export interface Api {
  document(): Promise<DocumentResponse>;
  widget(id: number): Promise<{ revision: number; entry: WidgetEntry }>;
  trace(selector: string): Promise<TracePayload>;
  track(type: TrackType, value: string): Promise<TrackPayload>;
  check(): Promise<CheckReport>;
  patchDisclosure(
    widgetId: number,
    revision: number,
    edit: DisclosureEdit,
  ): Promise<{ revision: number }>;
  save(): Promise<{ saved: string }>;
}

export class ApiClient implements Api {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  document(): Promise<DocumentResponse> {
    return this.fetchFn(this.url("/api/document")).then((r) =>
      parse<DocumentResponse>(r),
    );
  }

  widget(id: number): Promise<{ revision: number; entry: WidgetEntry }> {
    return this.fetchFn(this.url(`/api/widgets/${id}`)).then((r) =>
      parse<{ revision: number; entry: WidgetEntry }>(r),
    );
  }

  trace(selector: string): Promise<TracePayload> {
    return this.fetchFn(this.url(`/api/trace/${encodeURIComponent(selector)}`))
      .then((r) => parse<TracePayload>(r));
  }

  track(type: TrackType, value: string): Promise<TrackPayload> {
    const query = `type=${encodeURIComponent(type)}&value=${encodeURIComponent(value)}`;
    return this.fetchFn(this.url(`/api/track?${query}`)).then((r) =>
      parse<TrackPayload>(r),
    );
  }

  check(): Promise<CheckReport> {
    return this.fetchFn(this.url("/api/check"), { method: "POST" }).then((r) =>
      parse<CheckReport>(r),
    );
  }

  patchDisclosure(
    widgetId: number,
    revision: number,
    edit: DisclosureEdit,
  ): Promise<{ revision: number }> {
    return this.fetchFn(this.url(`/api/widgets/${widgetId}/disclosure`), {
      method: "PATCH",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ revision, ...edit }),
    }).then((r) => parse<{ revision: number }>(r));
  }

  save(): Promise<{ saved: string }> {
    return this.fetchFn(this.url("/api/save"), { method: "POST" }).then((r) =>
      parse<{ saved: string }>(r),
    );
  }
}
