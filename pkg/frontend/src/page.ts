// DOM wiring for the playground page. All state lives in PlanEditor and
// the parsed results; this module only renders snapshots and forwards
// events.

import { ServiceClient } from "./api.js";
import { GAP_MARKER, PlanEditor } from "./editor.js";
import type { EditorState } from "./editor.js";
import {
  CsvError,
  defaultM,
  defaultXi,
  distinctValues,
  parseResultsCsv,
  seriesOverM,
  seriesOverXi,
} from "./csv.js";
import type { ResultRow } from "./csv.js";
import { renderLineChart } from "./chart.js";

const client = new ServiceClient();
const editor = new PlanEditor(client);
let vocab = new Set<string>();
let resultRows: ResultRow[] = [];

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function renderChips(state: EditorState): void {
  const container = byId<HTMLDivElement>("chips");
  container.replaceChildren();
  if (state.slots.length === 0) {
    container.append(el("span", "hint", "empty plan; add actions or gaps"));
    return;
  }
  state.slots.forEach((slot, index) => {
    const isGap = slot.kind === "gap";
    const text = isGap ? GAP_MARKER : slot.text;
    const chip = el("span", isGap ? "chip gap" : "chip", text);
    if (!isGap) {
      const unknownPerService = state.invalidTokens.includes(slot.text);
      const unknownPerVocab = vocab.size > 0 && !vocab.has(slot.text);
      if (unknownPerService || unknownPerVocab) {
        chip.classList.add("invalid");
        chip.title = "not in the model vocabulary";
      }
    }
    const remove = el("button", "chip-remove", "×");
    remove.title = "remove";
    remove.addEventListener("click", () => editor.removeSlot(index));
    chip.append(remove);
    container.append(chip);
  });
}

function renderStatus(state: EditorState): void {
  const fetchBtn = byId<HTMLButtonElement>("fetch-btn");
  fetchBtn.disabled = !editor.canFetch() || state.pending;
  fetchBtn.textContent = state.pending ? "working…" : "suggest";

  const objective = byId<HTMLSpanElement>("objective");
  objective.textContent =
    state.objective === null ? "" : `objective ${state.objective.toFixed(3)}`;

  const banner = byId<HTMLDivElement>("editor-error");
  banner.replaceChildren();
  banner.hidden = state.error === null;
  if (state.error) {
    banner.append(el("span", undefined, state.error.message));
    if (state.error.retryable) {
      const retry = el("button", "retry", "retry");
      retry.addEventListener("click", () => void editor.fetchSuggestions());
      banner.append(retry);
    }
  }
}

function renderSuggestions(state: EditorState): void {
  const panel = byId<HTMLDivElement>("suggestions");
  panel.replaceChildren();
  if (!state.suggestions) {
    if (!state.pending && editor.canFetch()) {
      panel.append(el("p", "hint", "press suggest to rank completions"));
    }
    return;
  }
  if (state.suggestions.length === 0) {
    panel.append(el("p", "hint", "no gaps left; plan is complete"));
    return;
  }
  const maxWeight = Math.max(
    1e-9,
    ...state.suggestions.flatMap((g) => g.items.map((i) => i.weight)),
  );
  for (const gap of state.suggestions) {
    const box = el("div", "gap-box");
    box.append(el("h3", undefined, `gap at position ${gap.slot}`));
    const list = el("ul", "suggestion-list");
    gap.items.forEach((item, rank) => {
      const row = el("li");
      const pick = el("button", "suggestion");
      pick.append(el("span", "action", item.action));
      const bar = el("span", "bar");
      bar.style.width = `${Math.round((item.weight / maxWeight) * 100)}%`;
      pick.append(bar);
      pick.append(el("span", "weight", item.weight.toFixed(3)));
      pick.addEventListener("click", () =>
        editor.acceptSuggestion(gap.slot, rank),
      );
      row.append(pick);
      list.append(row);
    });
    box.append(list);
    panel.append(box);
  }
}

function render(): void {
  const state = editor.state;
  renderChips(state);
  renderStatus(state);
  renderSuggestions(state);
}

function addTokenFromInput(): void {
  const input = byId<HTMLInputElement>("token-input");
  const text = input.value.trim();
  if (text === "") {
    return;
  }
  if (text === GAP_MARKER) {
    editor.appendGap();
  } else {
    editor.appendToken(text);
  }
  input.value = "";
  input.focus();
}

async function loadServiceInfo(): Promise<void> {
  const line = byId<HTMLParagraphElement>("health");
  try {
    const health = await client.health();
    line.textContent =
      `model ${health.model_id}, dim ${health.dim}, ` +
      `window ${health.window}, ${health.vocab_size} actions`;
    const tokens = await client.vocab();
    vocab = new Set(tokens.tokens);
    const datalist = byId<HTMLDataListElement>("vocab-options");
    datalist.replaceChildren();
    for (const token of tokens.tokens) {
      const option = document.createElement("option");
      option.value = token;
      datalist.append(option);
    }
    render();
  } catch {
    line.textContent = "service unreachable; start it with: planrec serve";
    line.classList.add("error-text");
  }
}

function renderResults(): void {
  const empty = byId<HTMLParagraphElement>("results-empty");
  const chartXi = byId<HTMLDivElement>("chart-xi");
  const chartM = byId<HTMLDivElement>("chart-m");
  chartXi.replaceChildren();
  chartM.replaceChildren();
  if (resultRows.length === 0) {
    empty.hidden = false;
    empty.textContent = "no rows to plot";
    return;
  }
  empty.hidden = true;

  const mSelect = byId<HTMLSelectElement>("m-select");
  const xiSelect = byId<HTMLSelectElement>("xi-select");
  const m = Number(mSelect.value);
  const xi = Number(xiSelect.value);

  chartXi.innerHTML = renderLineChart({
    title: `accuracy vs masking fraction (m = ${m})`,
    xLabel: "masking fraction",
    yLabel: "accuracy",
    series: seriesOverXi(resultRows, m),
  });
  chartM.innerHTML = renderLineChart({
    title: `accuracy vs suggestion count (masking ${xi})`,
    xLabel: "suggestions per gap (m)",
    yLabel: "accuracy",
    series: seriesOverM(resultRows, xi),
  });
}

function fillSelect(select: HTMLSelectElement, values: number[], chosen: number | null): void {
  select.replaceChildren();
  for (const value of values) {
    const option = document.createElement("option");
    option.value = String(value);
    option.textContent = String(value);
    option.selected = value === chosen;
    select.append(option);
  }
  select.disabled = values.length === 0;
}

async function loadCsvFile(file: File): Promise<void> {
  const banner = byId<HTMLDivElement>("results-error");
  const warnings = byId<HTMLUListElement>("results-warnings");
  banner.hidden = true;
  banner.textContent = "";
  warnings.replaceChildren();
  try {
    const parsed = parseResultsCsv(await file.text());
    resultRows = parsed.rows;
    for (const message of parsed.rejected) {
      warnings.append(el("li", undefined, message));
    }
    fillSelect(byId("m-select"), distinctValues(resultRows, "m"), defaultM(resultRows));
    fillSelect(byId("xi-select"), distinctValues(resultRows, "xi"), defaultXi(resultRows));
    renderResults();
  } catch (err) {
    resultRows = [];
    renderResults();
    banner.hidden = false;
    banner.textContent =
      err instanceof CsvError ? err.message : `could not read file: ${err}`;
  }
}

function init(): void {
  editor.onChange = render;

  byId<HTMLButtonElement>("add-token").addEventListener("click", addTokenFromInput);
  byId<HTMLInputElement>("token-input").addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      event.preventDefault();
      addTokenFromInput();
    }
  });
  byId<HTMLButtonElement>("add-gap").addEventListener("click", () =>
    editor.appendGap(),
  );
  byId<HTMLButtonElement>("clear-btn").addEventListener("click", () =>
    editor.clear(),
  );
  byId<HTMLInputElement>("m-input").addEventListener("change", (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    editor.setM(value);
  });
  byId<HTMLButtonElement>("fetch-btn").addEventListener("click", () =>
    void editor.fetchSuggestions(),
  );

  byId<HTMLInputElement>("csv-input").addEventListener("change", (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    if (file) {
      void loadCsvFile(file);
    }
  });
  byId<HTMLSelectElement>("m-select").addEventListener("change", renderResults);
  byId<HTMLSelectElement>("xi-select").addEventListener("change", renderResults);

  render();
  void loadServiceInfo();
}

document.addEventListener("DOMContentLoaded", init);
