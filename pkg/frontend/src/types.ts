/** Payload shapes of the navigation service HTTP/JSON API. */

export interface SessionInfo {
  session_id: string;
  instance_id: string;
  k: number;
  y_star: number[];
  config: Record<string, unknown>;
}

export interface NavigateResult {
  lambda: number[];
  variant: string;
  gamma: number;
  intervals: [number, number][];
  gap: number[];
  L: number[];
  U: number[];
  U_fresh: number[];
  reused_members: number;
  timings: { incumbent_s: number; dual_s: number | null; shells_s: number[] };
  shell_delta: { lower: number; upper: number };
  requested_at: number;
  completed_at: number;
}

export type JobStatus = "queued" | "running" | "done" | "error";

export interface JobDoc {
  job_id: string;
  session_id: string;
  status: JobStatus;
  result?: NavigateResult;
  error?: string;
}

export interface HistoryEntry {
  lambda: number[];
  intervals: [number, number][];
  gap: number[];
}

export interface FrontPayload {
  instance: string;
  k: number;
  y_star: number[];
  lower: number[][];
  upper: number[][];
  history: HistoryEntry[];
}

export interface NavigationOverrides {
  gamma?: number;
  variant?: "chute1" | "chute2";
  tl?: number;
  ts?: number;
  n_stall?: number;
}
