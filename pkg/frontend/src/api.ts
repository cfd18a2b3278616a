/**
 * Typed client for the query service. Every number the console shows comes
 * through here; the console itself never touches raw data.
 */

export interface DatasetInfo {
  id: string;
  num_numeric: number;
  num_categorical: number;
}

export interface SchemaColumn {
  name: string;
  kind: "numeric" | "categorical";
  bounds?: [number, number];
  domain?: string[];
  missing_tokens?: string[];
}

export interface SchemaDoc {
  columns: SchemaColumn[];
}

export interface SessionInfo {
  session_id: string;
  dataset_id: string;
  budget: number;
  spent: number;
  remaining: number;
  eps_i_default: number;
  created_at: string;
}

export interface ChargeRow {
  index: number;
  label: string;
  epsilon: number;
  cumulative: number;
  composition: string;
}

export interface LedgerResponse {
  session_id: string;
  budget: number;
  spent: number;
  remaining: number;
  charges: ChargeRow[];
}

export interface QueryRequest {
  function: string;
  columns: string[];
  eps_i?: number;
  dataset_id?: string;
}

export interface QueryResponse {
  function: string;
  columns: string[];
  dataset_id: string;
  epsilon_charged: number;
  remaining: number;
  result: Record<string, unknown>;
}

export interface SynthesizeRequest {
  epsilon?: number;
  degree?: number;
  bins?: number;
}

export interface SynthesizeResponse {
  dataset_id: string;
  epsilon: number;
  eps1: number;
  eps2: number;
  degree: number;
  remaining: number;
}

/** Charge refused: the body carries the authoritative remaining budget. */
export class RefusalError extends Error {
  readonly remaining: number;

  constructor(message: string, remaining: number) {
    super(message);
    this.name = "RefusalError";
    this.remaining = remaining;
  }
}

/** Query needs an earlier release; `prerequisite` is its charge label. */
export class PrerequisiteError extends Error {
  readonly prerequisite: string;

  constructor(message: string, prerequisite: string) {
    super(message);
    this.name = "PrerequisiteError";
    this.prerequisite = prerequisite;
  }
}

export class ApiError extends Error {
  readonly status: number;

  constructor(message: string, status: number) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorFrom(response: Response): Promise<Error> {
  let body: Record<string, unknown> = {};
  try {
    body = (await response.json()) as Record<string, unknown>;
  } catch {
    // non-JSON error body; fall through to the generic message
  }
  const message = typeof body.error === "string" ? body.error : response.statusText;
  if (response.status === 402) {
    return new RefusalError(message, Number(body.remaining ?? 0));
  }
  if (response.status === 409 && typeof body.prerequisite === "string") {
    return new PrerequisiteError(message, body.prerequisite);
  }
  return new ApiError(message, response.status);
}

export class ServiceClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw await errorFrom(response);
    }
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw await errorFrom(response);
    }
    return (await response.json()) as T;
  }

  listDatasets(): Promise<DatasetInfo[]> {
    return this.get("/datasets");
  }

  getSchema(datasetId: string): Promise<SchemaDoc> {
    return this.get(`/datasets/${encodeURIComponent(datasetId)}/schema`);
  }

  createSession(datasetId: string, budget: number, epsIDefault?: number): Promise<SessionInfo> {
    const body: Record<string, unknown> = { dataset_id: datasetId, budget };
    if (epsIDefault !== undefined) {
      body.eps_i_default = epsIDefault;
    }
    return this.post("/sessions", body);
  }

  getSession(sessionId: string): Promise<SessionInfo> {
    return this.get(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  getLedger(sessionId: string): Promise<LedgerResponse> {
    return this.get(`/sessions/${encodeURIComponent(sessionId)}/ledger`);
  }

  postQuery(sessionId: string, request: QueryRequest): Promise<QueryResponse> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/query`, request);
  }

  synthesize(sessionId: string, request: SynthesizeRequest): Promise<SynthesizeResponse> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/synthesize`, request);
  }
}
