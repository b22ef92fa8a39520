/** Thin SVG/DOM builders; all layout decisions live in the view models. */

import { linearScale, ticks, type Scale } from "./scales.js";
import type {
  AttributionViewModel, Marker, ScatterPanelModel, TourViewModel,
} from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";

// categorical palette (classes) and a diverging-ish ramp for numeric colors
export const CLASS_COLORS = ["#7570b3", "#d95f02", "#1b9e77", "#e7298a", "#66a61e"];

export function numericColor(v: number, lo: number, hi: number): string {
  const t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  const ramp = Math.round(40 + t * 180);
  return `rgb(${ramp}, ${Math.round(90 + (1 - t) * 120)}, ${255 - ramp})`;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, attrs: Record<string, string> = {}, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

export function svg(tag: string, attrs: Record<string, string | number> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function axisTicks(root: SVGElement, scale: Scale, orient: "x" | "y", at: number): void {
  for (const t of ticks(scale.domain, 4)) {
    const px = scale(t);
    const label = svg("text", {
      class: "tick",
      x: orient === "x" ? px : at - 4,
      y: orient === "x" ? at + 12 : px + 3,
      "text-anchor": orient === "x" ? "middle" : "end",
    });
    label.textContent = Math.abs(t) >= 1000 ? t.toExponential(1) : String(+t.toPrecision(4));
    root.appendChild(label);
  }
}

function markerGlyph(m: Marker): SVGElement {
  const g = svg("g", { class: `marker ${m.kind}` });
  if (m.kind === "pi") {
    // asterisk
    for (const angle of [0, 60, 120]) {
      const rad = (angle * Math.PI) / 180;
      g.appendChild(svg("line", {
        x1: m.px - 7 * Math.cos(rad), y1: m.py - 7 * Math.sin(rad),
        x2: m.px + 7 * Math.cos(rad), y2: m.py + 7 * Math.sin(rad),
      }));
    }
  } else {
    // a multiplication cross
    for (const s of [1, -1]) {
      g.appendChild(svg("line", {
        x1: m.px - 6, y1: m.py - 6 * s, x2: m.px + 6, y2: m.py + 6 * s,
      }));
    }
  }
  return g;
}

export interface ScatterCallbacks {
  onPoint?: (index: number, event: MouseEvent) => void;
  onHover?: (index: number | null, event: MouseEvent) => void;
  onBrush?: (rect: { x0: number; y0: number; x1: number; y1: number }) => void;
}

export function renderScatter(
  model: ScatterPanelModel,
  width: number,
  height: number,
  colorFor: (p: { color: number }) => string,
  callbacks: ScatterCallbacks = {},
): SVGElement {
  const root = svg("svg", { width, height, class: "panel" });
  root.appendChild(svg("rect", { x: 0, y: 0, width, height, class: "panel-bg" }));
  const title = svg("text", { x: width / 2, y: 14, class: "title", "text-anchor": "middle" });
  title.textContent = model.title;
  root.appendChild(title);
  axisTicks(root, model.xScale, "x", height - 22);
  axisTicks(root, model.yScale, "y", 30);

  for (const p of model.points) {
    const dot = svg("circle", {
      cx: p.px, cy: p.py, r: p.brushed ? 4 : 2.5,
      class: p.brushed ? "dot brushed" : "dot",
      fill: colorFor(p),
      "data-index": p.index,
    });
    if (p.misclassified) {
      root.appendChild(svg("circle", {
        cx: p.px, cy: p.py, r: 6, class: "miscircle",
      }));
    }
    root.appendChild(dot);
  }
  for (const m of model.markers) root.appendChild(markerGlyph(m));

  if (callbacks.onPoint || callbacks.onHover) {
    root.addEventListener("click", (ev) => {
      const target = ev.target as Element;
      const idx = target.getAttribute("data-index");
      if (idx !== null) callbacks.onPoint?.(Number(idx), ev as MouseEvent);
    });
    root.addEventListener("mousemove", (ev) => {
      const target = ev.target as Element;
      const idx = target.getAttribute("data-index");
      callbacks.onHover?.(idx === null ? null : Number(idx), ev as MouseEvent);
    });
    root.addEventListener("mouseleave", (ev) => callbacks.onHover?.(null, ev as MouseEvent));
  }
  if (callbacks.onBrush) attachBrush(root, callbacks.onBrush);
  return root;
}

function attachBrush(
  root: SVGElement,
  onBrush: (rect: { x0: number; y0: number; x1: number; y1: number }) => void,
): void {
  let start: [number, number] | null = null;
  let rect: SVGElement | null = null;
  const pos = (ev: MouseEvent): [number, number] => {
    const bounds = (root as SVGGraphicsElement).getBoundingClientRect();
    return [ev.clientX - bounds.left, ev.clientY - bounds.top];
  };
  root.addEventListener("mousedown", (ev) => {
    if ((ev.target as Element).getAttribute("data-index") !== null) return;
    start = pos(ev as MouseEvent);
    rect = svg("rect", { class: "brush" });
    root.appendChild(rect);
    ev.preventDefault();
  });
  root.addEventListener("mousemove", (ev) => {
    if (!start || !rect) return;
    const [x, y] = pos(ev as MouseEvent);
    rect.setAttribute("x", String(Math.min(x, start[0])));
    rect.setAttribute("y", String(Math.min(y, start[1])));
    rect.setAttribute("width", String(Math.abs(x - start[0])));
    rect.setAttribute("height", String(Math.abs(y - start[1])));
  });
  const finish = (ev: MouseEvent) => {
    if (!start) return;
    const [x, y] = pos(ev);
    onBrush({ x0: start[0], y0: start[1], x1: x, y1: y });
    start = null;
    rect?.remove();
    rect = null;
  };
  root.addEventListener("mouseup", finish);
}

export function renderAttribution(
  model: AttributionViewModel,
  featureNames: string[],
  width: number,
  height: number,
): SVGElement {
  const root = svg("svg", { width, height, class: "panel" });
  root.appendChild(svg("rect", { x: 0, y: 0, width, height, class: "panel-bg" }));
  const x = linearScale(model.valueRange, [120, width - 12]);
  const rowGap = (height - 40) / Math.max(1, featureNames.length);
  const yOf = (feature: number) => 28 + rowGap * (feature + 0.5);

  const zero = x(0);
  root.appendChild(svg("line", { x1: zero, y1: 20, x2: zero, y2: height - 12, class: "zero-line" }));

  // one polyline per observation across the feature rows
  for (const line of model.lines) {
    const points = line.values.map((v, j) => `${x(v)},${yOf(j)}`).join(" ");
    root.appendChild(svg("polyline", { points, class: `pcp ${line.role}` }));
  }
  // overlay: the current tour basis as horizontal bars
  for (const bar of model.bars) {
    if (!bar.included) continue;
    const y = yOf(bar.feature);
    root.appendChild(svg("rect", {
      x: Math.min(zero, x(bar.value)),
      y: y - rowGap * 0.28,
      width: Math.abs(x(bar.value) - zero),
      height: rowGap * 0.56,
      class: bar.manipulated ? "bar manip" : "bar",
    }));
  }
  featureNames.forEach((name, j) => {
    const label = svg("text", {
      x: 112, y: yOf(j) + 3, class: "feature-label", "text-anchor": "end",
    });
    label.textContent = name;
    root.appendChild(label);
  });
  return root;
}

export function renderTour(
  model: TourViewModel,
  width: number,
  height: number,
): SVGElement {
  const root = svg("svg", { width, height, class: "panel" });
  root.appendChild(svg("rect", { x: 0, y: 0, width, height, class: "panel-bg" }));
  const x = linearScale(model.axisRange, [36, width - 10]);
  axisTicks(root, x, "x", height - 20);

  if (model.kind === "classification") {
    let peak = 0;
    for (const d of model.densities) peak = Math.max(peak, ...d.series.density);
    const y = linearScale([0, peak || 1], [height - 22, 14]);
    for (const d of model.densities) {
      const pts = d.series.grid.map((g, i) => `${x(g)},${y(d.series.density[i])}`).join(" ");
      const path = svg("polyline", {
        points: pts, class: "density", stroke: CLASS_COLORS[d.classIndex % CLASS_COLORS.length],
      });
      root.appendChild(path);
    }
  } else {
    const half = (height - 30) / 2;
    const yObs = linearScale(
      [Math.min(...model.observedPoints.map((p) => p.y)), Math.max(...model.observedPoints.map((p) => p.y))],
      [half, 16],
    );
    const yRes = linearScale(
      [Math.min(...model.residualPoints.map((p) => p.y)), Math.max(...model.residualPoints.map((p) => p.y))],
      [height - 22, half + 14],
    );
    for (const p of model.observedPoints) {
      root.appendChild(svg("circle", { cx: x(p.score), cy: yObs(p.y), r: 2, class: "dot" }));
    }
    for (const p of model.residualPoints) {
      root.appendChild(svg("circle", { cx: x(p.score), cy: yRes(p.y), r: 2, class: "dot residual" }));
    }
  }
  if (model.piScore !== null) {
    root.appendChild(svg("line", {
      x1: x(model.piScore), y1: 12, x2: x(model.piScore), y2: height - 22,
      class: "pi-line",
    }));
  }
  if (model.ciScore !== null) {
    root.appendChild(svg("line", {
      x1: x(model.ciScore), y1: 12, x2: x(model.ciScore), y2: height - 22,
      class: "ci-line",
    }));
  }
  return root;
}
