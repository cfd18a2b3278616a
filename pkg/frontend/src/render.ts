/**
 * DOM construction and updates. Everything on screen is drawn from
 * ConsoleState; this module never talks to the service.
 */

import type { SchemaColumn } from "./api.js";
import { DEFAULT_BOX, budgetLine, stepPath } from "./chart.js";
import { formatEpsilon, formatRisk, riskMultiplier, spentFraction } from "./meter.js";
import type { ConsoleState, Panel, PanelResult } from "./state.js";
import { submitDisabled } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ConsoleRefs {
  root: HTMLElement;
  meterRemaining: HTMLElement;
  meterSpent: HTMLElement;
  meterBudget: HTMLElement;
  meterRisk: HTMLElement;
  meterBar: HTMLElement;
  timelinePath: SVGPathElement;
  banner: HTMLElement;
  bannerMessage: HTMLElement;
  bannerAction: HTMLButtonElement;
  functionSelect: HTMLSelectElement;
  columnSelect: HTMLSelectElement;
  columnSelect2: HTMLSelectElement;
  epsInput: HTMLInputElement;
  submitButton: HTMLButtonElement;
  synthEpsInput: HTMLInputElement;
  synthDegreeInput: HTMLInputElement;
  synthButton: HTMLButtonElement;
  panels: HTMLElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function buildSkeleton(root: HTMLElement): ConsoleRefs {
  root.innerHTML = "";

  const meter = el("section", { class: "meter" });
  const remaining = el("span", { "data-meter-remaining": "" }, "0");
  const spent = el("span", { "data-meter-spent": "" }, "0");
  const budget = el("span", { "data-meter-budget": "" }, "0");
  const risk = el("span", { "data-risk": "" }, "1.00");
  const barOuter = el("div", { class: "meter-bar" });
  const bar = el("div", { class: "meter-bar-fill", "data-meter-bar": "" });
  barOuter.appendChild(bar);

  const line1 = el("p");
  line1.append("remaining ε ", remaining, " of ", budget, " (spent ", spent, ")");
  const line2 = el("p");
  line2.append("worst-case odds multiplier e^ε: ", risk);
  meter.append(el("h2", {}, "Privacy budget"), line1, line2, barOuter);

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${DEFAULT_BOX.width} ${DEFAULT_BOX.height}`);
  svg.setAttribute("class", "timeline");
  svg.setAttribute("data-timeline", "");
  const ceiling = document.createElementNS(SVG_NS, "path");
  ceiling.setAttribute("d", budgetLine());
  ceiling.setAttribute("class", "timeline-budget");
  const path = document.createElementNS(SVG_NS, "path");
  path.setAttribute("class", "timeline-spend");
  path.setAttribute("fill", "none");
  svg.append(ceiling, path);
  meter.appendChild(svg);

  const banner = el("div", { class: "banner", "data-banner": "", hidden: "" });
  const bannerMessage = el("span", { "data-banner-message": "" });
  const bannerAction = el("button", { "data-banner-action": "", type: "button" });
  banner.append(bannerMessage, bannerAction);

  const builder = el("section", { class: "builder" });
  const functionSelect = el("select", { "data-function": "" });
  for (const name of ["DIST", "MISS", "OUTL", "CORR"]) {
    functionSelect.appendChild(el("option", { value: name }, name));
  }
  const columnSelect = el("select", { "data-column": "" });
  const columnSelect2 = el("select", { "data-column-2": "", hidden: "" });
  const epsInput = el("input", {
    "data-eps": "",
    type: "number",
    step: "any",
    min: "0",
    placeholder: "session default",
    title: "per-query ε",
  });
  const submitButton = el("button", { "data-submit": "", type: "button" }, "Run query");
  const queryRow = el("div", { class: "builder-row" });
  queryRow.append(functionSelect, columnSelect, columnSelect2, epsInput, submitButton);

  const synthEpsInput = el("input", {
    "data-synth-eps": "",
    type: "number",
    step: "any",
    min: "0",
    placeholder: "server default",
    title: "synthesis ε",
  });
  const synthDegreeInput = el("input", {
    "data-synth-degree": "",
    type: "number",
    step: "1",
    min: "1",
    value: "4",
    title: "network degree",
  });
  const synthButton = el("button", { "data-synthesize": "", type: "button" }, "Synthesize");
  const synthRow = el("div", { class: "builder-row" });
  synthRow.append(synthEpsInput, synthDegreeInput, synthButton);

  builder.append(el("h2", {}, "Query"), queryRow, synthRow);

  const panels = el("section", { class: "panels", "data-panels": "" });

  root.append(meter, banner, builder, panels);

  return {
    root,
    meterRemaining: remaining,
    meterSpent: spent,
    meterBudget: budget,
    meterRisk: risk,
    meterBar: bar,
    timelinePath: path,
    banner,
    bannerMessage,
    bannerAction,
    functionSelect,
    columnSelect,
    columnSelect2,
    epsInput,
    submitButton,
    synthEpsInput,
    synthDegreeInput,
    synthButton,
    panels,
  };
}

/** Numeric kinds only make sense for MISS and OUTL. */
export function eligibleColumns(functionName: string, columns: SchemaColumn[]): SchemaColumn[] {
  if (functionName === "MISS" || functionName === "OUTL") {
    return columns.filter((column) => column.kind === "numeric");
  }
  return columns;
}

export function populateColumns(refs: ConsoleRefs, state: ConsoleState): void {
  const schema = state.schema;
  const columns = schema ? eligibleColumns(refs.functionSelect.value, schema.columns) : [];
  for (const select of [refs.columnSelect, refs.columnSelect2]) {
    const previous = select.value;
    select.innerHTML = "";
    for (const column of columns) {
      select.appendChild(el("option", { value: column.name }, column.name));
    }
    if (columns.some((column) => column.name === previous)) {
      select.value = previous;
    }
  }
  if (refs.functionSelect.value === "CORR") {
    refs.columnSelect2.removeAttribute("hidden");
  } else {
    refs.columnSelect2.setAttribute("hidden", "");
  }
}

function describeResult(functionName: string, result: Record<string, unknown>): string[] {
  if (functionName === "DIST" && result.kind === "numeric") {
    const values = result.values as Record<string, number>;
    return ["min", "q1", "q2", "q3", "max"].map(
      (part) => `${part}: ${formatNumber(values[part])}`,
    );
  }
  if (functionName === "DIST" && result.kind === "categorical") {
    const categories = result.categories as string[];
    const counts = result.counts as number[];
    return categories.map((name, i) => `${name}: ${formatNumber(counts[i])}`);
  }
  if (functionName === "MISS" || functionName === "OUTL") {
    return [`count: ${formatNumber(result.count as number)}`];
  }
  if (functionName === "CORR") {
    if (result.undefined) {
      return [`${String(result.method)}: undefined`];
    }
    return [`${String(result.method)}: ${formatNumber(result.coefficient as number)}`];
  }
  return [JSON.stringify(result)];
}

function formatNumber(value: number | undefined): string {
  if (value === undefined || Number.isNaN(value)) {
    return "?";
  }
  return Number.isInteger(value) ? String(value) : value.toFixed(3);
}

function renderSide(
  functionName: string,
  title: string,
  side: PanelResult | undefined,
): HTMLElement {
  const box = el("div", { class: "panel-side", "data-side": title });
  box.appendChild(el("h4", {}, title));
  if (!side) {
    box.appendChild(el("p", { class: "empty" }, "n/a"));
    return box;
  }
  const list = el("ul");
  for (const line of describeResult(functionName, side.result)) {
    list.appendChild(el("li", {}, line));
  }
  box.appendChild(list);
  let footer = `charged ε ${formatEpsilon(side.epsilonCharged)}`;
  if (typeof side.result.noise_scale === "number") {
    footer += `, noise scale ${formatNumber(side.result.noise_scale)}`;
  }
  box.appendChild(el("p", { class: "charge" }, footer));
  return box;
}

function renderPanel(panel: Panel): HTMLElement {
  const section = el("article", {
    class: "panel",
    "data-panel": `${panel.functionName}:${panel.columns.join("~")}`,
  });
  section.appendChild(el("h3", {}, `${panel.functionName} ${panel.columns.join(" × ")}`));
  const sides = el("div", { class: "panel-sides" });
  sides.appendChild(renderSide(panel.functionName, "interactive", panel.interactive));
  if (panel.synthetic) {
    sides.appendChild(renderSide(panel.functionName, "synthetic", panel.synthetic));
  }
  section.appendChild(sides);
  return section;
}

export function render(refs: ConsoleRefs, state: ConsoleState): void {
  refs.meterRemaining.textContent = formatEpsilon(state.remaining);
  refs.meterSpent.textContent = formatEpsilon(state.spent);
  refs.meterBudget.textContent = formatEpsilon(state.budget);
  refs.meterRisk.textContent = formatRisk(riskMultiplier(state.spent));
  refs.meterBar.style.width = `${(spentFraction(state.spent, state.budget) * 100).toFixed(1)}%`;
  refs.timelinePath.setAttribute("d", stepPath(state.charges, state.budget));

  if (state.banner) {
    refs.banner.removeAttribute("hidden");
    refs.banner.setAttribute("data-kind", state.banner.kind);
    if (state.banner.kind === "refusal") {
      refs.bannerMessage.textContent =
        `${state.banner.message} (remaining ε ${formatEpsilon(state.banner.remaining)})`;
      refs.bannerAction.setAttribute("hidden", "");
    } else {
      refs.bannerMessage.textContent = state.banner.message;
      refs.bannerAction.textContent = `Run ${state.banner.prerequisite} first`;
      refs.bannerAction.removeAttribute("hidden");
    }
  } else {
    refs.banner.setAttribute("hidden", "");
    refs.banner.removeAttribute("data-kind");
  }

  refs.submitButton.disabled = submitDisabled(state);

  refs.panels.innerHTML = "";
  for (const panel of state.panels.values()) {
    refs.panels.appendChild(renderPanel(panel));
  }
}
