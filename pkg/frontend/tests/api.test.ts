import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { JobDoc } from "../src/types.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

interface Call {
  url: string;
  init?: RequestInit;
}

function fakeClient(script: ((call: Call) => Response)[]) {
  const calls: Call[] = [];
  const sleeps: number[] = [];
  const client = new ApiClient(
    "http://svc",
    async (url, init) => {
      const call = { url, init };
      calls.push(call);
      const step = script.shift();
      if (!step) throw new Error(`unexpected request ${url}`);
      return step(call);
    },
    async (ms) => {
      sleeps.push(ms);
    },
  );
  return { client, calls, sleeps };
}

describe("ApiClient", () => {
  it("maps error bodies to ApiError with code and status", async () => {
    const { client } = fakeClient([
      () => jsonResponse(422, { code: "invalid_lambda", message: "bad weights" }),
    ]);
    const err = await client
      .submitNavigation("s1", [0.5, 0.5])
      .then(() => null, (e: unknown) => e as ApiError);
    expect(err).toBeInstanceOf(ApiError);
    expect(err!.status).toBe(422);
    expect(err!.code).toBe("invalid_lambda");
    expect(err!.message).toBe("bad weights");
  });

  it("polls at 500 ms with geometric backoff", async () => {
    const pending: JobDoc = { job_id: "j", session_id: "s", status: "running" };
    const done: JobDoc = {
      job_id: "j", session_id: "s", status: "done",
      result: {} as never,
    };
    const { client, sleeps } = fakeClient([
      () => jsonResponse(200, pending),
      () => jsonResponse(200, pending),
      () => jsonResponse(200, pending),
      () => jsonResponse(200, done),
    ]);
    const job = await client.pollJob("j");
    expect(job.status).toBe("done");
    expect(sleeps).toEqual([500, 750, 1125]);
  });

  it("caps the poll interval", async () => {
    const pending: JobDoc = { job_id: "j", session_id: "s", status: "queued" };
    const script = Array.from({ length: 7 }, () => () => jsonResponse(200, pending));
    script.push(() => jsonResponse(200, { ...pending, status: "done", result: {} } as never));
    const { client, sleeps } = fakeClient(script);
    await client.pollJob("j", { intervalMs: 1000, backoff: 2, maxIntervalMs: 3000 });
    expect(Math.max(...sleeps)).toBeLessThanOrEqual(3000);
  });

  it("navigate submits then polls and unwraps the result", async () => {
    const result = { lambda: [0.5, 0.5], gap: [1, 2] };
    const { client, calls } = fakeClient([
      (call) => {
        expect(call.url).toBe("http://svc/sessions/s9/navigate");
        expect(JSON.parse(String(call.init!.body))).toEqual(
          { lambda: [0.5, 0.5], gamma: 30 });
        return jsonResponse(202, { job_id: "j9", status: "queued" });
      },
      (call) => {
        expect(call.url).toBe("http://svc/jobs/j9");
        return jsonResponse(200,
          { job_id: "j9", session_id: "s9", status: "done", result });
      },
    ]);
    const got = await client.navigate("s9", [0.5, 0.5], { gamma: 30 });
    expect(got).toEqual(result);
    expect(calls.length).toBe(2);
  });

  it("navigate surfaces failed jobs as ApiError", async () => {
    const { client } = fakeClient([
      () => jsonResponse(202, { job_id: "j", status: "queued" }),
      () => jsonResponse(200,
        { job_id: "j", session_id: "s", status: "error", error: "boom" }),
    ]);
    const err = await client
      .navigate("s", [0.5, 0.5])
      .then(() => null, (e: unknown) => e as ApiError);
    expect(err!.code).toBe("job_failed");
    expect(err!.message).toBe("boom");
  });

  it("poll timeout raises instead of spinning forever", async () => {
    const pending: JobDoc = { job_id: "j", session_id: "s", status: "running" };
    const script = Array.from({ length: 50 }, () => () => jsonResponse(200, pending));
    const { client } = fakeClient(script);
    const err = await client
      .pollJob("j", { intervalMs: 400, backoff: 1, timeoutMs: 1000 })
      .then(() => null, (e: unknown) => e as ApiError);
    expect(err!.code).toBe("poll_timeout");
  });
});
