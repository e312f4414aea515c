/** Typed client for the navigation service; all state changes go through it. */

import type {
  FrontPayload,
  JobDoc,
  NavigateResult,
  NavigationOverrides,
  SessionInfo,
} from "./types.js";

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

export interface PollOptions {
  /** first wait between job polls; later waits back off geometrically */
  intervalMs?: number;
  backoff?: number;
  maxIntervalMs?: number;
  timeoutMs?: number;
}

const POLL_DEFAULTS: Required<PollOptions> = {
  intervalMs: 500,
  backoff: 1.5,
  maxIntervalMs: 4000,
  timeoutMs: 120_000,
};

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;
type SleepLike = (ms: number) => Promise<void>;

const defaultSleep: SleepLike = (ms) => new Promise((r) => setTimeout(r, ms));

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
    private readonly sleep: SleepLike = defaultSleep,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    let doc: unknown = null;
    try {
      doc = text ? JSON.parse(text) : null;
    } catch {
      doc = null;
    }
    if (!resp.ok) {
      const err = (doc ?? {}) as { code?: string; message?: string };
      throw new ApiError(resp.status, err.code ?? "http_error", err.message ?? text);
    }
    return doc as T;
  }

  uploadInstance(doc: unknown): Promise<{ instance_id: string }> {
    return this.request("POST", "/instances", doc);
  }

  createSession(body: Record<string, unknown>): Promise<SessionInfo> {
    return this.request("POST", "/sessions", body);
  }

  submitNavigation(
    sessionId: string,
    lambda: number[],
    overrides: NavigationOverrides = {},
  ): Promise<{ job_id: string }> {
    return this.request("POST", `/sessions/${sessionId}/navigate`, {
      lambda,
      ...overrides,
    });
  }

  getJob(jobId: string): Promise<JobDoc> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  async pollJob(jobId: string, options: PollOptions = {}): Promise<JobDoc> {
    const opts = { ...POLL_DEFAULTS, ...options };
    let wait = opts.intervalMs;
    let waited = 0;
    for (;;) {
      const job = await this.getJob(jobId);
      if (job.status === "done" || job.status === "error") return job;
      if (waited + wait > opts.timeoutMs) {
        throw new ApiError(408, "poll_timeout", `job ${jobId} still ${job.status}`);
      }
      await this.sleep(wait);
      waited += wait;
      wait = Math.min(wait * opts.backoff, opts.maxIntervalMs);
    }
  }

  /** Submit and poll to completion; rejects with ApiError if the job fails. */
  async navigate(
    sessionId: string,
    lambda: number[],
    overrides: NavigationOverrides = {},
    poll: PollOptions = {},
  ): Promise<NavigateResult> {
    const { job_id } = await this.submitNavigation(sessionId, lambda, overrides);
    const job = await this.pollJob(job_id, poll);
    if (job.status === "error" || job.result === undefined) {
      throw new ApiError(500, "job_failed", job.error ?? "navigation failed");
    }
    return job.result;
  }

  getFront(sessionId: string): Promise<FrontPayload> {
    return this.request("GET", `/sessions/${sessionId}/front`);
  }

  getHistory(sessionId: string): Promise<{ entries: NavigateResult[] }> {
    return this.request("GET", `/sessions/${sessionId}/history`);
  }
}
