/** Thin fetch wrapper for the scenario service.
 *
 * The fetch function is injectable so tests can serve canned responses
 * captured from a real service run. Every number shown in the UI comes
 * through here; nothing downstream recomputes solver output.
 */

import type { PayoffResponse, ProblemBody, SolveResponse } from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; text(): Promise<string> }>;

export class ServiceError extends Error {
  readonly status: number;
  readonly violations: string[];

  constructor(status: number, message: string, violations: string[] = []) {
    super(message);
    this.status = status;
    this.violations = violations;
  }
}

/** 409 from the service: the scenario's constraints admit no schedule. */
export class InfeasibleError extends ServiceError {}

async function problemFrom(status: number, raw: string): Promise<ServiceError> {
  let message = raw.trim() || `service returned ${status}`;
  let violations: string[] = [];
  try {
    const body = JSON.parse(raw) as ProblemBody;
    if (typeof body.error === "string") message = body.error;
    if (Array.isArray(body.violations)) violations = body.violations;
  } catch {
    // non-JSON error body, keep the raw text
  }
  const cls = status === 409 ? InfeasibleError : ServiceError;
  return new cls(status, message, violations);
}

export class ServiceClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    const fallback: FetchLike | undefined =
      typeof fetch === "function" ? (fetch as unknown as FetchLike) : undefined;
    const chosen = fetchFn ?? fallback;
    if (!chosen) throw new Error("no fetch implementation available");
    this.fetchFn = chosen;
  }

  private async request<T>(method: string, path: string, body?: string): Promise<T> {
    const response = await this.fetchFn(this.base + path, {
      method,
      headers: { "content-type": "application/json" },
      body,
    });
    const text = await response.text();
    if (response.status >= 400) throw await problemFrom(response.status, text);
    return JSON.parse(text) as T;
  }

  async health(): Promise<boolean> {
    try {
      const response = await this.fetchFn(this.base + "/healthz", { method: "GET" });
      return response.status === 200;
    } catch {
      return false;
    }
  }

  /** Upload a project document verbatim; returns the service-assigned id. */
  createProject(fileText: string): Promise<{ id: string }> {
    return this.request("POST", "/api/projects", fileText);
  }

  payoff(projectId: string): Promise<PayoffResponse> {
    return this.request("GET", `/api/projects/${projectId}/payoff`);
  }

  solve(projectId: string, scenarioText: string): Promise<SolveResponse> {
    return this.request("POST", `/api/projects/${projectId}/solve`, scenarioText);
  }
}
