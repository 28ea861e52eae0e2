/** Typed fetch client for the session service.

All mutations return the fresh state summary; errors arrive as ApiError
with the HTTP status, the service's message, and (for stale-dendrogram
409s) the suggested recovery action.
*/

import type { ClusterSelector, LinesPayload, StateSummary } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly action?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface UploadRequest {
  csv?: string;
  synth?: Record<string, unknown>;
  kind?: string;
  config?: Record<string, unknown>;
}

export interface ParamPatch {
  min_density?: number;
  k?: number;
  metric?: string;
  log_scale?: boolean;
}

function messageFromDetail(detail: unknown): { message: string; action?: string } {
  if (typeof detail === "string") return { message: detail };
  if (Array.isArray(detail)) {
    // pydantic validation errors: one entry per offending field
    const parts = detail.map((e) => {
      const item = e as { loc?: unknown[]; msg?: string };
      const loc = (item.loc ?? []).join(".");
      return loc ? `${loc}: ${item.msg ?? "invalid"}` : item.msg ?? "invalid";
    });
    return { message: parts.join("; ") };
  }
  if (detail && typeof detail === "object") {
    const obj = detail as { message?: string; action?: string; row?: number };
    const message = obj.message ?? JSON.stringify(detail);
    return {
      message: obj.row != null ? `${message} (row ${obj.row})` : message,
      action: obj.action,
    };
  }
  return { message: "request failed" };
}

async function raiseFor(res: Response): Promise<never> {
  let detail: unknown = null;
  try {
    detail = ((await res.json()) as { detail?: unknown }).detail;
  } catch {
    // non-JSON error body; fall through to the status line
  }
  const { message, action } = messageFromDetail(detail ?? res.statusText);
  throw new ApiError(res.status, message, action);
}

export class ServiceClient {
  constructor(public baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) await raiseFor(res);
    return (await res.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(req: UploadRequest): Promise<StateSummary> {
    return this.post("/sessions", req);
  }

  getState(id: string): Promise<StateSummary> {
    return this.request(`/sessions/${id}/state`);
  }

  setParams(id: string, patch: ParamPatch): Promise<StateSummary> {
    return this.post(`/sessions/${id}/params`, patch);
  }

  /** Rebuild the bin sample and dendrogram; recovery for stale-sample 409s. */
  preprocess(id: string, minDensity?: number): Promise<StateSummary> {
    return this.post(`/sessions/${id}/preprocess`,
      minDensity == null ? {} : { min_density: minDensity });
  }

  split(id: string, clusterId: number): Promise<StateSummary> {
    return this.post(`/sessions/${id}/clusters/${clusterId}/split`, {});
  }

  setHue(id: string, clusterId: number, degrees: number, pinned = true):
      Promise<StateSummary> {
    return this.post(`/sessions/${id}/hues`,
      { cluster: clusterId, degrees, pinned });
  }

  setTemplate(id: string, name: string): Promise<StateSummary> {
    return this.post(`/sessions/${id}/template`, { name });
  }

  getLines(id: string, cluster: ClusterSelector): Promise<LinesPayload> {
    return this.request(`/sessions/${id}/lines?cluster=${cluster}`);
  }

  /** Image URL for the current revision; the rev query busts stale caches. */
  renderUrl(id: string, scale: number, revision: number): string {
    return `${this.baseUrl}/sessions/${id}/render?scale=${scale}&rev=${revision}`;
  }
}
