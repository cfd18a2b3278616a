/**
 * Orchestration: service calls in, state updates out, one render per step.
 *
 * The meter invariant is enforced here: after every request that can change
 * the ledger (success or refusal alike) the console refetches the ledger and
 * redraws from that snapshot. Nothing is decremented client side.
 */

import { PrerequisiteError, RefusalError, ServiceClient } from "./api.js";
import type { QueryRequest } from "./api.js";
import { buildSkeleton, populateColumns, render } from "./render.js";
import type { ConsoleRefs } from "./render.js";
import { applyLedger, applyQueryResponse, applySession, initialState } from "./state.js";
import type { ConsoleState } from "./state.js";

interface PendingQuery {
  functionName: string;
  columns: string[];
  epsI?: number;
}

export class Console {
  readonly state: ConsoleState;
  readonly refs: ConsoleRefs;
  private readonly client: ServiceClient;
  private pending: PendingQuery | null = null;

  constructor(client: ServiceClient, root: HTMLElement) {
    this.client = client;
    this.state = initialState();
    this.refs = buildSkeleton(root);
    this.attach();
    render(this.refs, this.state);
  }

  private attach(): void {
    this.refs.functionSelect.addEventListener("change", () => {
      populateColumns(this.refs, this.state);
    });
    this.refs.submitButton.addEventListener("click", () => {
      const columns = [this.refs.columnSelect.value];
      if (this.refs.functionSelect.value === "CORR") {
        columns.push(this.refs.columnSelect2.value);
      }
      const epsRaw = this.refs.epsInput.value.trim();
      const epsI = epsRaw === "" ? undefined : Number(epsRaw);
      void this.submitQuery(this.refs.functionSelect.value, columns, epsI).catch(reportError);
    });
    this.refs.synthButton.addEventListener("click", () => {
      const epsRaw = this.refs.synthEpsInput.value.trim();
      const degreeRaw = this.refs.synthDegreeInput.value.trim();
      void this.synthesize(
        epsRaw === "" ? undefined : Number(epsRaw),
        degreeRaw === "" ? undefined : Number(degreeRaw),
      ).catch(reportError);
    });
    this.refs.bannerAction.addEventListener("click", () => {
      void this.runPrerequisite().catch(reportError);
    });
  }

  async start(datasetId: string, budget: number, epsIDefault?: number): Promise<void> {
    const info = await this.client.createSession(datasetId, budget, epsIDefault);
    const schema = await this.client.getSchema(datasetId);
    applySession(this.state, info);
    this.state.schema = schema;
    populateColumns(this.refs, this.state);
    await this.refreshLedger();
  }

  async submitQuery(functionName: string, columns: string[], epsI?: number): Promise<void> {
    const sessionId = this.requireSession();
    this.state.banner = null;
    const request: QueryRequest = { function: functionName, columns };
    if (epsI !== undefined) {
      request.eps_i = epsI;
    }
    try {
      const response = await this.client.postQuery(sessionId, request);
      applyQueryResponse(this.state, response);
      this.pending = null;
      if (this.state.syntheticId !== null) {
        await this.mirrorOnSynthetic(request);
      }
    } catch (error) {
      if (error instanceof RefusalError) {
        this.state.banner = {
          kind: "refusal",
          message: error.message,
          remaining: error.remaining,
        };
        // the budget may be gone, but synthetic answers are free: keep the
        // comparison view usable with a synthetic-only panel
        if (this.state.syntheticId !== null) {
          await this.mirrorOnSynthetic(request);
        }
      } else if (error instanceof PrerequisiteError) {
        this.pending = { functionName, columns, epsI };
        this.state.banner = {
          kind: "prerequisite",
          message: error.message,
          prerequisite: error.prerequisite,
        };
      } else {
        await this.refreshLedger();
        throw error;
      }
    }
    await this.refreshLedger();
  }

  /** One click on the banner: run the named release, then retry the blocked query. */
  async runPrerequisite(): Promise<void> {
    const banner = this.state.banner;
    if (!banner || banner.kind !== "prerequisite") {
      return;
    }
    const column = banner.prerequisite.split("/")[1];
    const retry = this.pending;
    if (!column) {
      return;
    }
    await this.submitQuery("DIST", [column]);
    if (retry && this.state.banner === null) {
      await this.submitQuery(retry.functionName, retry.columns, retry.epsI);
    }
  }

  async synthesize(epsilon?: number, degree?: number): Promise<void> {
    const sessionId = this.requireSession();
    this.state.banner = null;
    try {
      const response = await this.client.synthesize(sessionId, {
        ...(epsilon !== undefined ? { epsilon } : {}),
        ...(degree !== undefined ? { degree } : {}),
      });
      this.state.syntheticId = response.dataset_id;
      for (const panel of this.state.panels.values()) {
        await this.mirrorOnSynthetic({
          function: panel.functionName,
          columns: panel.columns,
        });
      }
    } catch (error) {
      if (error instanceof RefusalError) {
        this.state.banner = {
          kind: "refusal",
          message: error.message,
          remaining: error.remaining,
        };
      } else {
        await this.refreshLedger();
        throw error;
      }
    }
    await this.refreshLedger();
  }

  async refreshLedger(): Promise<void> {
    const sessionId = this.requireSession();
    const ledger = await this.client.getLedger(sessionId);
    applyLedger(this.state, ledger);
    render(this.refs, this.state);
  }

  /** Same query against the synthetic rows; free, so failures only log. */
  private async mirrorOnSynthetic(request: QueryRequest): Promise<void> {
    const sessionId = this.requireSession();
    const syntheticId = this.state.syntheticId;
    if (syntheticId === null) {
      return;
    }
    try {
      const response = await this.client.postQuery(sessionId, {
        ...request,
        dataset_id: syntheticId,
      });
      applyQueryResponse(this.state, response);
    } catch (error) {
      reportError(error);
    }
  }

  private requireSession(): string {
    if (this.state.sessionId === null) {
      throw new Error("no session open");
    }
    return this.state.sessionId;
  }
}

function reportError(error: unknown): void {
  console.error(error);
}
