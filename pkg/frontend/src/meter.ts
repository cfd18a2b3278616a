/**
 * Budget meter arithmetic: display helpers only. The inputs are always the
 * server's ledger numbers; nothing here feeds back into budget decisions.
 */

/**
 * Worst-case multiplicative change in anyone's posterior odds after all
 * releases so far: e raised to the spent budget.
 */
export function riskMultiplier(spent: number): number {
  return Math.exp(spent);
}

export function formatEpsilon(value: number): string {
  if (value === 0) {
    return "0";
  }
  if (Math.abs(value) >= 0.001) {
    const fixed = value.toFixed(4);
    return fixed.replace(/0+$/, "").replace(/\.$/, "");
  }
  return value.toExponential(2);
}

export function formatRisk(multiplier: number): string {
  if (multiplier >= 1000) {
    return multiplier.toExponential(2);
  }
  return multiplier.toFixed(2);
}

/** Fraction of the budget already spent, clamped to [0, 1] for the bar. */
export function spentFraction(spent: number, budget: number): number {
  if (budget <= 0) {
    return 0;
  }
  return Math.min(1, Math.max(0, spent / budget));
}
