/** Workbench bootstrap: wires the API, state machine, and panels together. */

import { ApiError, Client } from "./api.js";
import { CLASS_COLORS, el, numericColor, renderAttribution, renderScatter, renderTour } from "./render.js";
import * as st from "./state.js";
import type { AttributionsPayload, GlobalPayload, Meta, SelectionRow, TourResponse } from "./types.js";
import {
  attributionView, brushSelect, densityGrid, pathBandwidth, scatterPanel,
  tourView, type GlobalAxis, type ScatterPanelModel,
} from "./viewmodel.js";

const PANEL_W = 330;
const PANEL_H = 280;
const PLAYBACK_FPS = 20;

interface App {
  client: Client;
  meta: Meta;
  state: st.ViewerState;
  global: GlobalPayload | null;
  attributions: AttributionsPayload | null;
  tour: TourResponse | null;
  bandwidth: number;
  grid: number[];
  panelModels: Map<GlobalAxis, ScatterPanelModel>;
  tourInFlight: AbortController | null;
  timer: number | null;
}

function statusLine(text: string, isError = false): void {
  const node = document.getElementById("status")!;
  node.textContent = text;
  node.className = isError ? "error" : "";
}

function apply(app: App, result: st.Result): boolean {
  app.state = result.state;
  if (result.rejected) statusLine(result.rejected, true);
  return !result.rejected;
}

async function loadGlobal(app: App): Promise<void> {
  app.global = await app.client.global(app.state.color);
  renderGlobalPanels(app);
}

async function loadTour(app: App): Promise<void> {
  if (app.state.piIndex === null) return;
  app.tourInFlight?.abort();
  const controller = new AbortController();
  app.tourInFlight = controller;
  try {
    const tour = await app.client.tour({
      pi_index: app.state.piIndex,
      manip_var: app.state.manipVar,
      include: app.state.include.length === app.meta.p ? undefined : app.state.include,
    });
    if (controller.signal.aborted) return;
    app.tour = tour;
    app.bandwidth = pathBandwidth(tour);
    app.grid = densityGrid(tour, app.bandwidth);
    apply(app, st.tourLoaded(app.state, tour.frames.length));
    statusLine(`tour: ${tour.frames.length} frames, ${tour.explained_target}`);
    renderTourPanels(app);
  } catch (err) {
    if (err instanceof ApiError) {
      statusLine(`tour rejected: ${err.message}`, true);
      app.tour = null;
      renderTourPanels(app);
    } else {
      throw err;
    }
  }
}

function colorFor(app: App) {
  const payload = app.global!;
  if (app.meta.task === "classification" && payload.color === "predicted_class") {
    return (p: { color: number }) => CLASS_COLORS[p.color % CLASS_COLORS.length];
  }
  const values = payload.records.map((r) => r.color);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  return (p: { color: number }) => numericColor(p.color, lo, hi);
}

function renderGlobalPanels(app: App): void {
  if (!app.global) return;
  const brushed = new Set(app.state.brush);
  const host = document.getElementById("global-panels")!;
  host.replaceChildren();
  const axes: [GlobalAxis, string][] = [
    ["data", "data space (PC1 x PC2)"],
    ["attr", "attribution space (PC1 x PC2)"],
    ["fit", "predicted vs observed"],
  ];
  const paint = colorFor(app);
  for (const [axis, title] of axes) {
    const model = scatterPanel(
      app.global.records, axis, title, PANEL_W, PANEL_H,
      app.state.piIndex, app.state.ciIndex, brushed,
    );
    app.panelModels.set(axis, model);
    host.appendChild(renderScatter(model, PANEL_W, PANEL_H, paint, {
      onPoint: (index, ev) => void onPointClick(app, index, ev),
      onHover: (index) => onHover(app, index),
      onBrush: (rect) => void onBrush(app, axis, rect),
    }));
  }
}

function renderTourPanels(app: App): void {
  const barsHost = document.getElementById("attribution-panel")!;
  const tourHost = document.getElementById("tour-panel")!;
  barsHost.replaceChildren();
  tourHost.replaceChildren();
  if (!app.attributions) return;
  const basis = app.tour
    ? app.tour.frames[app.state.frameCursor].basis
    : app.attributions.normalized[app.state.piIndex ?? 0] ?? [];
  const model = attributionView(
    app.attributions.normalized, basis, app.state.manipVar, app.state.include,
    app.state.piIndex, app.state.ciIndex,
  );
  barsHost.appendChild(renderAttribution(model, app.meta.feature_names, PANEL_W + 60, PANEL_H));
  if (app.tour && app.global) {
    const tm = tourView(
      app.tour, app.state.frameCursor, app.meta, app.global.records,
      app.bandwidth, app.grid, app.state.piIndex, app.state.ciIndex,
    );
    tourHost.appendChild(renderTour(tm, PANEL_W + 60, PANEL_H));
  }
  const slider = document.getElementById("frame-slider") as HTMLInputElement;
  slider.max = String(Math.max(0, app.state.frameCount - 1));
  slider.value = String(app.state.frameCursor);
  const angle = app.tour ? app.tour.frames[app.state.frameCursor].angle : 0;
  document.getElementById("frame-label")!.textContent =
    app.tour ? `frame ${app.state.frameCursor + 1}/${app.state.frameCount} (angle ${angle.toFixed(2)})` : "no tour";
}

async function onPointClick(app: App, index: number, ev: MouseEvent): Promise<void> {
  if (ev.shiftKey || ev.altKey) {
    if (!apply(app, st.setCi(app.state, index))) return;
  } else {
    apply(app, st.setPi(app.state, index));
    await loadTour(app);
  }
  renderGlobalPanels(app);
  renderTourPanels(app);
  syncInputs(app);
}

let hoverTimer: number | null = null;

function onHover(app: App, index: number | null): void {
  const tip = document.getElementById("tooltip")!;
  if (index === null) {
    tip.style.display = "none";
    return;
  }
  if (hoverTimer !== null) clearTimeout(hoverTimer);
  hoverTimer = setTimeout(() => {
    void app.client.observation(index).then((obs) => {
      const lines = [`obs ${obs.label}`];
      if (app.meta.task === "classification") {
        lines.push(`observed ${obs.observed_label}, predicted ${obs.predicted_label}`);
        if (obs.misclassified) lines.push("MISCLASSIFIED");
      } else {
        lines.push(`observed ${obs.observed.toPrecision(5)}`);
        lines.push(`predicted ${obs.predicted.toPrecision(5)}`);
      }
      tip.textContent = lines.join(" | ");
      tip.style.display = "block";
    });
  }, 80) as unknown as number;
}

async function onBrush(
  app: App, axis: GlobalAxis, rect: { x0: number; y0: number; x1: number; y1: number },
): Promise<void> {
  const model = app.panelModels.get(axis);
  if (!model) return;
  const indices = brushSelect(model.points, rect);
  apply(app, st.setBrush(app.state, indices));
  renderGlobalPanels(app);
  const { rows } = await app.client.selection(indices);
  renderTable(app, rows);
}

function renderTable(app: App, rows: SelectionRow[]): void {
  const host = document.getElementById("selection-table")!;
  host.replaceChildren();
  if (rows.length === 0) {
    host.appendChild(el("p", { class: "hint" }, "brush points in a global panel to populate the table"));
    return;
  }
  const stats = app.global ? [app.global.color] : [];
  const headers = ["label", "observed", "predicted", ...stats, ...app.meta.feature_names];
  const table = el("table");
  const headRow = el("tr");
  for (const h of headers) headRow.appendChild(el("th", {}, h));
  table.appendChild(headRow);
  for (const row of rows) {
    const tr = el("tr");
    const obs = app.meta.task === "classification"
      ? String((row as Record<string, unknown>)["observed_label"] ?? row.observed)
      : Number(row.observed).toPrecision(5);
    const pred = app.meta.task === "classification"
      ? String((row as Record<string, unknown>)["predicted_label"] ?? row.predicted)
      : Number(row.predicted).toPrecision(5);
    tr.appendChild(el("td", {}, row.label));
    tr.appendChild(el("td", {}, obs));
    tr.appendChild(el("td", {}, pred));
    for (const s of stats) {
      const v = (row as Record<string, unknown>)[s];
      tr.appendChild(el("td", {}, typeof v === "number" ? v.toPrecision(4) : String(v)));
    }
    for (const name of app.meta.feature_names) {
      tr.appendChild(el("td", {}, String(row.features[name])));
    }
    table.appendChild(tr);
  }
  host.appendChild(table);
}

function syncInputs(app: App): void {
  (document.getElementById("pi-input") as HTMLInputElement).value =
    app.state.piIndex === null ? "" : String(app.state.piIndex);
  (document.getElementById("ci-input") as HTMLInputElement).value =
    app.state.ciIndex === null ? "" : String(app.state.ciIndex);
  const boxes = document.querySelectorAll<HTMLInputElement>("#include-vars input");
  boxes.forEach((box) => {
    box.checked = app.state.include.includes(Number(box.value));
  });
}

function buildControls(app: App): void {
  const colorSelect = document.getElementById("color-select") as HTMLSelectElement;
  for (const stat of app.meta.color_statistics) {
    colorSelect.appendChild(el("option", { value: stat }, stat));
  }
  colorSelect.value = app.state.color;
  colorSelect.addEventListener("change", () => {
    apply(app, st.setColor(app.state, colorSelect.value));
    void loadGlobal(app);
  });

  const manipSelect = document.getElementById("manip-select") as HTMLSelectElement;
  app.meta.feature_names.forEach((name, j) => {
    manipSelect.appendChild(el("option", { value: String(j) }, name));
  });
  manipSelect.addEventListener("change", () => {
    apply(app, st.setManipVar(app.state, Number(manipSelect.value)));
    void loadTour(app);
  });

  const includeHost = document.getElementById("include-vars")!;
  app.meta.feature_names.forEach((name, j) => {
    const label = el("label");
    const box = el("input", { type: "checkbox", value: String(j) });
    box.checked = true;
    box.addEventListener("change", () => {
      if (!apply(app, st.toggleInclude(app.state, j, app.meta.p))) {
        box.checked = app.state.include.includes(j);
        return;
      }
      void loadTour(app);
    });
    label.appendChild(box);
    label.appendChild(document.createTextNode(name));
    includeHost.appendChild(label);
  });

  const piInput = document.getElementById("pi-input") as HTMLInputElement;
  piInput.addEventListener("change", () => {
    const v = Number(piInput.value);
    if (Number.isInteger(v) && v >= 0 && v < app.meta.n) {
      apply(app, st.setPi(app.state, v));
      void loadTour(app).then(() => {
        renderGlobalPanels(app);
        renderTourPanels(app);
      });
    }
  });
  const ciInput = document.getElementById("ci-input") as HTMLInputElement;
  ciInput.addEventListener("change", () => {
    const v = Number(ciInput.value);
    if (ciInput.value === "") {
      apply(app, st.clearCi(app.state));
    } else if (Number.isInteger(v) && v >= 0 && v < app.meta.n) {
      if (!apply(app, st.setCi(app.state, v))) {
        ciInput.value = "";
        return;
      }
    }
    renderGlobalPanels(app);
    renderTourPanels(app);
  });

  const slider = document.getElementById("frame-slider") as HTMLInputElement;
  slider.addEventListener("input", () => {
    apply(app, st.scrub(app.state, Number(slider.value)));
    renderTourPanels(app);
  });

  const playButton = document.getElementById("play-button") as HTMLButtonElement;
  playButton.addEventListener("click", () => {
    apply(app, st.setPlaying(app.state, !app.state.playing));
    playButton.textContent = app.state.playing ? "pause" : "play";
    if (app.state.playing && app.timer === null) {
      app.timer = setInterval(() => {
        apply(app, st.tick(app.state));
        renderTourPanels(app);
        if (!app.state.playing && app.timer !== null) {
          clearInterval(app.timer);
          app.timer = null;
        }
      }, 1000 / PLAYBACK_FPS) as unknown as number;
    } else if (!app.state.playing && app.timer !== null) {
      clearInterval(app.timer);
      app.timer = null;
    }
  });

  document.addEventListener("mousemove", (ev) => {
    const tip = document.getElementById("tooltip")!;
    tip.style.left = `${ev.pageX + 12}px`;
    tip.style.top = `${ev.pageY + 12}px`;
  });
}

export async function boot(base = ""): Promise<void> {
  const client = new Client(base);
  let meta: Meta;
  try {
    meta = await client.meta();
  } catch {
    statusLine("no bundle is being served; start with: shaptour serve --bundle <file>", true);
    return;
  }
  const defaultColor = meta.task === "classification" ? "predicted_class" : "residual";
  const app: App = {
    client,
    meta,
    state: st.initialState(meta.p, defaultColor),
    global: null,
    attributions: null,
    tour: null,
    bandwidth: 1,
    grid: [],
    panelModels: new Map(),
    tourInFlight: null,
    timer: null,
  };
  document.getElementById("dataset-name")!.textContent =
    `${meta.name} - ${meta.task}, n=${meta.n}, p=${meta.p}`;
  buildControls(app);
  app.attributions = await client.attributions();
  await loadGlobal(app);
  renderTourPanels(app);
  renderTable(app, []);
  statusLine("click a point to set the primary observation; shift-click sets the comparison");
}

if (typeof document !== "undefined" && document.getElementById("global-panels")) {
  void boot();
}
