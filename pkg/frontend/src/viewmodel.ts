/** Pure view models: payloads + state in, drawable structures out.
 * Everything here is renderer-independent and unit-tested in node.
 */

import { gaussianKde, makeGrid, silvermanBandwidth, type DensitySeries } from "./kde.js";
import { extent, linearScale, padded, type Scale } from "./scales.js";
import type { GlobalRecord, Meta, TourResponse } from "./types.js";

export interface PanelPoint {
  index: number;
  x: number;
  y: number;
  px: number;
  py: number;
  color: number;
  misclassified: boolean;
  brushed: boolean;
}

export interface Marker {
  kind: "pi" | "ci";
  index: number;
  px: number;
  py: number;
}

export interface ScatterPanelModel {
  title: string;
  points: PanelPoint[];
  markers: Marker[];
  xScale: Scale;
  yScale: Scale;
}

export type GlobalAxis = "data" | "attr" | "fit";

function coords(r: GlobalRecord, axis: GlobalAxis): [number, number] {
  if (axis === "data") return [r.data_pc1, r.data_pc2];
  if (axis === "attr") return [r.attr_pc1, r.attr_pc2];
  return [r.predicted, r.observed];
}

export function scatterPanel(
  records: GlobalRecord[],
  axis: GlobalAxis,
  title: string,
  width: number,
  height: number,
  piIndex: number | null,
  ciIndex: number | null,
  brushed: Set<number>,
): ScatterPanelModel {
  const xy = records.map((r) => coords(r, axis));
  const xScale = linearScale(padded(extent(xy.map((c) => c[0]))), [30, width - 8]);
  const yScale = linearScale(padded(extent(xy.map((c) => c[1]))), [height - 22, 8]);
  const points = records.map((r, i) => ({
    index: r.index,
    x: xy[i][0],
    y: xy[i][1],
    px: xScale(xy[i][0]),
    py: yScale(xy[i][1]),
    color: r.color,
    misclassified: r.misclassified === true,
    brushed: brushed.has(r.index),
  }));
  const markers: Marker[] = [];
  for (const [kind, idx] of [["pi", piIndex], ["ci", ciIndex]] as const) {
    if (idx === null) continue;
    const point = points.find((pt) => pt.index === idx);
    if (point) markers.push({ kind, index: idx, px: point.px, py: point.py });
  }
  return { title, points, markers, xScale, yScale };
}

export interface BrushRect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

/** Row indices whose pixel position falls inside the rectangle. */
export function brushSelect(points: PanelPoint[], rect: BrushRect): number[] {
  const xlo = Math.min(rect.x0, rect.x1);
  const xhi = Math.max(rect.x0, rect.x1);
  const ylo = Math.min(rect.y0, rect.y1);
  const yhi = Math.max(rect.y0, rect.y1);
  return points
    .filter((p) => p.px >= xlo && p.px <= xhi && p.py >= ylo && p.py <= yhi)
    .map((p) => p.index);
}

export interface BasisBar {
  feature: number;
  value: number;
  manipulated: boolean;
  included: boolean;
}

export interface AttributionViewModel {
  lines: { index: number; values: number[]; role: "pi" | "ci" | "other" }[];
  bars: BasisBar[];
  valueRange: [number, number];
}

/** Parallel-coordinates rows plus the current tour basis as bars.
 * The bars always equal the basis of the frame shown in the tour view.
 */
export function attributionView(
  normalized: number[][],
  basis: number[],
  manipVar: number,
  include: number[],
  piIndex: number | null,
  ciIndex: number | null,
): AttributionViewModel {
  const included = new Set(include);
  const lines = normalized.map((values, index) => ({
    index,
    values,
    role: index === piIndex ? ("pi" as const) : index === ciIndex ? ("ci" as const) : ("other" as const),
  }));
  const bars = basis.map((value, feature) => ({
    feature,
    value,
    manipulated: feature === manipVar,
    included: included.has(feature),
  }));
  let lo = -1;
  let hi = 1;
  for (const row of normalized) for (const v of row) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return { lines, bars, valueRange: [lo, hi] };
}

export interface ClassDensity {
  classIndex: number;
  label: string;
  series: DensitySeries;
}

export interface TourViewModel {
  kind: Task2;
  axisRange: [number, number];
  piScore: number | null;
  ciScore: number | null;
  densities: ClassDensity[];
  observedPoints: { score: number; y: number; index: number }[];
  residualPoints: { score: number; y: number; index: number }[];
}

type Task2 = "classification" | "regression";

export const DENSITY_GRID_POINTS = 128;

/** Bandwidth from the pooled scores of the whole path (fixed across frames). */
export function pathBandwidth(tour: TourResponse): number {
  const pooled: number[] = [];
  for (const frame of tour.frames) pooled.push(...frame.scores);
  return silvermanBandwidth(pooled);
}

export function densityGrid(tour: TourResponse, bandwidth: number): number[] {
  const [lo, hi] = tour.axis_range;
  return makeGrid(lo - 3 * bandwidth, hi + 3 * bandwidth, DENSITY_GRID_POINTS);
}

export function tourView(
  tour: TourResponse,
  frameCursor: number,
  meta: Meta,
  records: GlobalRecord[],
  bandwidth: number,
  grid: number[],
  piIndex: number | null,
  ciIndex: number | null,
): TourViewModel {
  const frame = tour.frames[frameCursor];
  const scores = frame.scores;
  const densities: ClassDensity[] = [];
  const observedPoints: TourViewModel["observedPoints"] = [];
  const residualPoints: TourViewModel["residualPoints"] = [];
  if (meta.task === "classification") {
    const levels = meta.levels ?? [];
    for (let c = 0; c < levels.length; c++) {
      const values = records.filter((r) => r.predicted === c).map((r) => scores[r.index]);
      if (values.length === 0) continue;
      densities.push({ classIndex: c, label: levels[c], series: gaussianKde(values, grid, bandwidth) });
    }
  } else {
    for (const r of records) {
      observedPoints.push({ score: scores[r.index], y: r.observed, index: r.index });
      residualPoints.push({ score: scores[r.index], y: r.observed - r.predicted, index: r.index });
    }
  }
  return {
    kind: meta.task,
    axisRange: tour.axis_range,
    piScore: piIndex === null ? null : scores[piIndex],
    ciScore: ciIndex === null ? null : scores[ciIndex],
    densities,
    observedPoints,
    residualPoints,
  };
}
