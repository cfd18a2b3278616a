/**
 * Console state. One rule above all: the budget meter (budget, spent,
 * remaining, charges) is written only from service ledger or session
 * snapshots. Query responses update result panels, never the meter, so the
 * numbers on screen are always the server's numbers.
 */

import type { ChargeRow, LedgerResponse, QueryResponse, SchemaDoc, SessionInfo } from "./api.js";

export interface PanelResult {
  epsilonCharged: number;
  result: Record<string, unknown>;
}

export interface Panel {
  functionName: string;
  columns: string[];
  interactive?: PanelResult;
  synthetic?: PanelResult;
}

export type Banner =
  | { kind: "refusal"; message: string; remaining: number }
  | { kind: "prerequisite"; message: string; prerequisite: string };

export interface ConsoleState {
  sessionId: string | null;
  datasetId: string | null;
  schema: SchemaDoc | null;
  budget: number;
  spent: number;
  remaining: number;
  epsDefault: number;
  charges: ChargeRow[];
  panels: Map<string, Panel>;
  banner: Banner | null;
  syntheticId: string | null;
}

export function initialState(): ConsoleState {
  return {
    sessionId: null,
    datasetId: null,
    schema: null,
    budget: 0,
    spent: 0,
    remaining: 0,
    epsDefault: 0,
    charges: [],
    panels: new Map(),
    banner: null,
    syntheticId: null,
  };
}

export function panelKey(functionName: string, columns: string[]): string {
  return `${functionName}:${columns.join("~")}`;
}

export function applySession(state: ConsoleState, info: SessionInfo): void {
  state.sessionId = info.session_id;
  state.datasetId = info.dataset_id;
  state.budget = info.budget;
  state.spent = info.spent;
  state.remaining = info.remaining;
  state.epsDefault = info.eps_i_default;
}

export function applyLedger(state: ConsoleState, ledger: LedgerResponse): void {
  state.budget = ledger.budget;
  state.spent = ledger.spent;
  state.remaining = ledger.remaining;
  state.charges = ledger.charges;
}

/** Upsert the panel for this query. Leaves the meter untouched. */
export function applyQueryResponse(state: ConsoleState, response: QueryResponse): Panel {
  const key = panelKey(response.function, response.columns);
  let panel = state.panels.get(key);
  if (!panel) {
    panel = { functionName: response.function, columns: response.columns };
    state.panels.set(key, panel);
  }
  const side: PanelResult = {
    epsilonCharged: response.epsilon_charged,
    result: response.result,
  };
  if (state.syntheticId !== null && response.dataset_id === state.syntheticId) {
    panel.synthetic = side;
  } else {
    panel.interactive = side;
  }
  return panel;
}

/**
 * Advisory only: grey out the submit control when the default charge cannot
 * fit. The server still makes the real decision on every request.
 */
export function submitDisabled(state: ConsoleState): boolean {
  return state.remaining < state.epsDefault;
}
