import type {
  ApiErrorBody, AttributionsPayload, GlobalPayload, Meta, ObsDetail,
  SelectionRow, TourRequest, TourResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(base + path, init);
  const body = await resp.json();
  if (!resp.ok) {
    const err = (body as ApiErrorBody).error ?? { code: "unknown", message: "request failed" };
    throw new ApiError(resp.status, err.code, err.message);
  }
  return body as T;
}

/** Typed client for the explorer service. */
export class Client {
  constructor(readonly base: string = "") {}

  meta(): Promise<Meta> {
    return request<Meta>(this.base, "/api/meta");
  }

  global(color: string): Promise<GlobalPayload> {
    return request<GlobalPayload>(this.base, `/api/global?color=${encodeURIComponent(color)}`);
  }

  attributions(): Promise<AttributionsPayload> {
    return request<AttributionsPayload>(this.base, "/api/attributions");
  }

  tour(req: TourRequest): Promise<TourResponse> {
    return request<TourResponse>(this.base, "/api/tour", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  observation(i: number): Promise<ObsDetail> {
    return request<ObsDetail>(this.base, `/api/obs/${i}`);
  }

  selection(indices: number[]): Promise<{ rows: SelectionRow[] }> {
    return request<{ rows: SelectionRow[] }>(this.base, "/api/selection", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ indices }),
    });
  }
}
