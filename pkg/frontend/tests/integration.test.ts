// @vitest-environment jsdom
//
// End-to-end check against a real service process: the console's meter must
// track the server ledger exactly, submission must lock once the budget is
// gone, and a refused charge must raise the refusal banner.
import { spawn } from "node:child_process";
import type { ChildProcess } from "node:child_process";

import { afterAll, beforeAll, expect, test } from "vitest";

import { ServiceClient } from "../src/api.js";
import { Console } from "../src/controller.js";

const port = 18700 + Math.floor(Math.random() * 800);
const baseUrl = `http://127.0.0.1:${port}`;
const realFetch = globalThis.fetch;

let child: ChildProcess;
let stderr = "";

beforeAll(async () => {
  child = spawn(
    "python3",
    ["-m", "dpeda", "serve", "--demo", "--port", String(port), "--seed", "42"],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  child.stderr?.on("data", (chunk: Buffer) => {
    stderr += chunk.toString();
  });
  const deadline = Date.now() + 30_000;
  for (;;) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early (code ${child.exitCode}):\n${stderr}`);
    }
    try {
      const response = await realFetch(`${baseUrl}/datasets`);
      if (response.ok) {
        return;
      }
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      throw new Error(`service did not come up on port ${port}:\n${stderr}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
}, 60_000);

afterAll(() => {
  child?.kill("SIGTERM");
});

test(
  "meter follows the server ledger: exact decrements, lockout, refusal banner",
  async () => {
    document.body.innerHTML = '<div id="root"></div>';
    const client = new ServiceClient(baseUrl, (input, init) => realFetch(input, init));
    const view = new Console(client, document.getElementById("root") as HTMLElement);

    // six default charges of budget: one numeric distribution (5 releases)
    // plus one missingness count spend it exactly
    await view.start("cafe", 0.06, 0.01);
    const shown = (): string =>
      document.querySelector("[data-meter-remaining]")?.textContent ?? "";
    expect(view.state.remaining).toBe(0.06);
    expect(shown()).toBe("0.06");

    await view.submitQuery("DIST", ["total"]);
    // five sequential releases at 0.01 each: the displayed remaining drops
    // by exactly 5 * eps_i, straight from the refetched ledger
    expect(view.state.remaining).toBe(0.01);
    expect(shown()).toBe("0.01");
    expect(view.state.charges).toHaveLength(5);
    for (const charge of view.state.charges) {
      expect(charge.epsilon).toBe(0.01);
    }
    expect(view.state.charges[4]?.cumulative).toBe(0.05);
    expect(view.refs.submitButton.disabled).toBe(false);
    const distPanel = document.querySelector('[data-panel="DIST:total"]');
    expect(distPanel).not.toBeNull();
    // the rendered side carries the charge and calibration alongside the
    // values; scale = width 50 over eps 0.01
    expect(distPanel?.textContent).toContain("charged ε 0.05");
    expect(distPanel?.textContent).toContain("noise scale 5000");

    await view.submitQuery("MISS", ["total"]);
    expect(view.state.remaining).toBe(0);
    expect(shown()).toBe("0");
    expect(view.state.charges).toHaveLength(6);

    // nothing left: the submit control must lock
    expect(view.refs.submitButton.disabled).toBe(true);

    // forcing one more query past the disabled control gets a server
    // refusal, which raises the banner and changes nothing in the ledger
    await view.submitQuery("MISS", ["wait_minutes"]);
    const banner = document.querySelector("[data-banner]") as HTMLElement;
    expect(banner.hasAttribute("hidden")).toBe(false);
    expect(banner.getAttribute("data-kind")).toBe("refusal");
    expect(banner.textContent).toContain("remaining");
    expect(view.state.remaining).toBe(0);
    expect(view.state.charges).toHaveLength(6);
    expect(document.querySelector('[data-panel="MISS:wait_minutes"]')).toBeNull();
  },
  30_000,
);

test(
  "outlier prerequisite round-trips through the banner against the live service",
  async () => {
    document.body.innerHTML = '<div id="root"></div>';
    const client = new ServiceClient(baseUrl, (input, init) => realFetch(input, init));
    const view = new Console(client, document.getElementById("root") as HTMLElement);
    await view.start("cafe", 1.0, 0.01);

    await view.submitQuery("OUTL", ["total"]);
    const banner = document.querySelector("[data-banner]") as HTMLElement;
    expect(banner.getAttribute("data-kind")).toBe("prerequisite");
    expect(view.state.charges).toHaveLength(0);

    await view.runPrerequisite();
    expect(banner.hasAttribute("hidden")).toBe(true);
    expect(document.querySelector('[data-panel="DIST:total"]')).not.toBeNull();
    expect(document.querySelector('[data-panel="OUTL:total"]')).not.toBeNull();
    expect(view.state.charges).toHaveLength(6);
    expect(view.state.remaining).toBe(0.94);
  },
  30_000,
);

test(
  "synthesis charges once and mirrors panels for side-by-side comparison",
  async () => {
    document.body.innerHTML = '<div id="root"></div>';
    const client = new ServiceClient(baseUrl, (input, init) => realFetch(input, init));
    const view = new Console(client, document.getElementById("root") as HTMLElement);
    await view.start("cafe", 1.0, 0.01);

    await view.submitQuery("MISS", ["total"]);
    await view.synthesize(0.1, 2);
    expect(view.state.syntheticId).not.toBeNull();
    expect(view.state.charges.map((c) => c.label)).toContain("SYNTH");
    expect(view.state.remaining).toBe(0.89);

    const sides = document.querySelectorAll('[data-panel="MISS:total"] [data-side]');
    expect(sides).toHaveLength(2);
    expect(sides[1]?.getAttribute("data-side")).toBe("synthetic");
    expect(sides[1]?.textContent).toContain("charged ε 0");
  },
  60_000,
);
