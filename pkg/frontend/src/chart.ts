/**
 * Spend timeline: cumulative budget as a step chart. Pure string-building so
 * it can be tested without a DOM.
 */

import type { ChargeRow } from "./api.js";

export interface ChartBox {
  width: number;
  height: number;
  padding: number;
}

export const DEFAULT_BOX: ChartBox = { width: 360, height: 120, padding: 8 };

/**
 * SVG path for the cumulative spend after each charge. Starts at zero before
 * the first charge; each charge is a horizontal run followed by a vertical
 * rise, so partial spending reads as a staircase. The y axis spans [0, yMax]
 * (typically the session budget).
 */
export function stepPath(charges: ChargeRow[], yMax: number, box: ChartBox = DEFAULT_BOX): string {
  const innerW = box.width - 2 * box.padding;
  const innerH = box.height - 2 * box.padding;
  const top = yMax > 0 ? yMax : 1;
  const x = (i: number): number =>
    box.padding + (charges.length > 0 ? (i / charges.length) * innerW : 0);
  const y = (v: number): number => box.padding + innerH - (Math.min(v, top) / top) * innerH;

  let path = `M ${x(0)} ${y(0)}`;
  charges.forEach((charge, i) => {
    path += ` L ${x(i + 1)} ${y(i === 0 ? 0 : charges[i - 1]!.cumulative)}`;
    path += ` L ${x(i + 1)} ${y(charge.cumulative)}`;
  });
  return path;
}

/** Horizontal guide line at the budget ceiling (the top of the y axis). */
export function budgetLine(box: ChartBox = DEFAULT_BOX): string {
  return `M ${box.padding} ${box.padding} L ${box.width - box.padding} ${box.padding}`;
}
