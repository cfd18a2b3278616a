import { describe, expect, test } from "vitest";

import { ApiError, PrerequisiteError, RefusalError, ServiceClient } from "../src/api.js";

interface Call {
  input: string;
  init?: RequestInit;
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function stubClient(...responses: Response[]): { client: ServiceClient; calls: Call[] } {
  const calls: Call[] = [];
  const queue = [...responses];
  const client = new ServiceClient("http://svc", async (input, init) => {
    calls.push({ input, init });
    const next = queue.shift();
    if (!next) {
      throw new Error("stub ran out of responses");
    }
    return next;
  });
  return { client, calls };
}

describe("request shapes", () => {
  test("listDatasets hits GET /datasets", async () => {
    const { client, calls } = stubClient(json(200, [{ id: "cafe", num_numeric: 2, num_categorical: 2 }]));
    const datasets = await client.listDatasets();
    expect(calls[0]?.input).toBe("http://svc/datasets");
    expect(calls[0]?.init).toBeUndefined();
    expect(datasets[0]?.id).toBe("cafe");
  });

  test("a trailing slash in the base url is dropped", async () => {
    const calls: Call[] = [];
    const client = new ServiceClient("http://svc:8000/", async (input, init) => {
      calls.push({ input, init });
      return json(200, []);
    });
    await client.listDatasets();
    expect(calls[0]?.input).toBe("http://svc:8000/datasets");
  });

  test("createSession posts the session body as JSON", async () => {
    const { client, calls } = stubClient(
      json(201, {
        session_id: "ses-1",
        dataset_id: "cafe",
        budget: 0.5,
        spent: 0,
        remaining: 0.5,
        eps_i_default: 0.02,
        created_at: "2026-01-01T00:00:00+00:00",
      }),
    );
    const info = await client.createSession("cafe", 0.5, 0.02);
    expect(calls[0]?.input).toBe("http://svc/sessions");
    expect(calls[0]?.init?.method).toBe("POST");
    expect(new Headers(calls[0]?.init?.headers).get("content-type")).toBe("application/json");
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({
      dataset_id: "cafe",
      budget: 0.5,
      eps_i_default: 0.02,
    });
    expect(info.session_id).toBe("ses-1");
  });

  test("createSession omits the default epsilon when not given", async () => {
    const { client, calls } = stubClient(json(201, {}));
    await client.createSession("cafe", 0.5);
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({ dataset_id: "cafe", budget: 0.5 });
  });

  test("postQuery passes eps_i and dataset_id through untouched", async () => {
    const { client, calls } = stubClient(json(200, {}));
    await client.postQuery("ses-1", {
      function: "MISS",
      columns: ["total"],
      eps_i: 0.05,
      dataset_id: "syn-1",
    });
    expect(calls[0]?.input).toBe("http://svc/sessions/ses-1/query");
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({
      function: "MISS",
      columns: ["total"],
      eps_i: 0.05,
      dataset_id: "syn-1",
    });
  });

  test("ids are url-encoded", async () => {
    const { client, calls } = stubClient(json(200, {}));
    await client.getLedger("ses x/1");
    expect(calls[0]?.input).toBe("http://svc/sessions/ses%20x%2F1/ledger");
  });
});

describe("error mapping", () => {
  test("402 becomes RefusalError with the authoritative remaining", async () => {
    const { client } = stubClient(json(402, { error: "budget exhausted", remaining: 0.04 }));
    const error = await client
      .postQuery("ses-1", { function: "MISS", columns: ["total"] })
      .then(() => null, (e: unknown) => e);
    expect(error).toBeInstanceOf(RefusalError);
    expect((error as RefusalError).remaining).toBe(0.04);
    expect((error as RefusalError).message).toBe("budget exhausted");
  });

  test("409 becomes PrerequisiteError carrying the charge label", async () => {
    const { client } = stubClient(json(409, { error: "needs DIST first", prerequisite: "DIST/total" }));
    const error = await client
      .postQuery("ses-1", { function: "OUTL", columns: ["total"] })
      .then(() => null, (e: unknown) => e);
    expect(error).toBeInstanceOf(PrerequisiteError);
    expect((error as PrerequisiteError).prerequisite).toBe("DIST/total");
  });

  test("other statuses become ApiError with the status attached", async () => {
    const { client } = stubClient(json(404, { error: "unknown dataset" }));
    const error = await client.getSchema("ghost").then(() => null, (e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(404);
    expect((error as ApiError).message).toBe("unknown dataset");
  });

  test("a non-JSON error body falls back to the status text", async () => {
    const { client } = stubClient(
      new Response("<html>boom</html>", { status: 500, statusText: "Server Error" }),
    );
    const error = await client.listDatasets().then(() => null, (e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).message).toBe("Server Error");
  });
});
