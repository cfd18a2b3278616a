/**
 * Browser entry point: pick a dataset, set a budget, open the console.
 * Served from the same origin as the query service, so the client uses
 * relative URLs.
 */

import { ServiceClient } from "./api.js";
import { Console } from "./controller.js";

function field(labelText: string, input: HTMLInputElement | HTMLSelectElement): HTMLLabelElement {
  const label = document.createElement("label");
  label.append(labelText + " ");
  label.appendChild(input);
  return label;
}

async function boot(): Promise<void> {
  const app = document.getElementById("app");
  if (!app) {
    throw new Error("missing #app element");
  }
  const client = new ServiceClient("");

  const form = document.createElement("form");
  form.className = "setup";
  const datasetSelect = document.createElement("select");
  const datasets = await client.listDatasets();
  for (const info of datasets) {
    const option = document.createElement("option");
    option.value = info.id;
    option.textContent = `${info.id} (${info.num_numeric} numeric, ${info.num_categorical} categorical)`;
    datasetSelect.appendChild(option);
  }
  const budgetInput = document.createElement("input");
  budgetInput.type = "number";
  budgetInput.step = "any";
  budgetInput.min = "0";
  budgetInput.value = "1.0";
  const epsInput = document.createElement("input");
  epsInput.type = "number";
  epsInput.step = "any";
  epsInput.min = "0";
  epsInput.value = "0.01";
  const startButton = document.createElement("button");
  startButton.type = "submit";
  startButton.textContent = "Open session";
  form.append(
    field("dataset", datasetSelect),
    field("total budget ε", budgetInput),
    field("per-query ε", epsInput),
    startButton,
  );

  const mount = document.createElement("div");
  mount.id = "console";
  app.append(form, mount);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const budget = Number(budgetInput.value);
    const epsDefault = Number(epsInput.value);
    if (!(budget > 0) || !(epsDefault > 0)) {
      alert("budget and per-query ε must be positive");
      return;
    }
    const consoleView = new Console(client, mount);
    consoleView
      .start(datasetSelect.value, budget, epsDefault)
      .then(() => {
        form.setAttribute("hidden", "");
      })
      .catch((error: unknown) => {
        alert(error instanceof Error ? error.message : String(error));
      });
  });
}

void boot().catch((error: unknown) => {
  const app = document.getElementById("app");
  if (app) {
    app.textContent = `failed to reach the service: ${error instanceof Error ? error.message : String(error)}`;
  }
});
