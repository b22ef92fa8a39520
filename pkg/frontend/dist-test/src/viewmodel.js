/** Pure view models: payloads + state in, drawable structures out.
 * Everything here is renderer-independent and unit-tested in node.
 */
import { gaussianKde, makeGrid, silvermanBandwidth } from "./kde.js";
import { extent, linearScale, padded } from "./scales.js";
function coords(r, axis) {
    if (axis === "data")
        return [r.data_pc1, r.data_pc2];
    if (axis === "attr")
        return [r.attr_pc1, r.attr_pc2];
    return [r.predicted, r.observed];
}
export function scatterPanel(records, axis, title, width, height, piIndex, ciIndex, brushed) {
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
    const markers = [];
    for (const [kind, idx] of [["pi", piIndex], ["ci", ciIndex]]) {
        if (idx === null)
            continue;
        const point = points.find((pt) => pt.index === idx);
        if (point)
            markers.push({ kind, index: idx, px: point.px, py: point.py });
    }
    return { title, points, markers, xScale, yScale };
}
/** Row indices whose pixel position falls inside the rectangle. */
export function brushSelect(points, rect) {
    const xlo = Math.min(rect.x0, rect.x1);
    const xhi = Math.max(rect.x0, rect.x1);
    const ylo = Math.min(rect.y0, rect.y1);
    const yhi = Math.max(rect.y0, rect.y1);
    return points
        .filter((p) => p.px >= xlo && p.px <= xhi && p.py >= ylo && p.py <= yhi)
        .map((p) => p.index);
}
/** Parallel-coordinates rows plus the current tour basis as bars.
 * The bars always equal the basis of the frame shown in the tour view.
 */
export function attributionView(normalized, basis, manipVar, include, piIndex, ciIndex) {
    const included = new Set(include);
    const lines = normalized.map((values, index) => ({
        index,
        values,
        role: index === piIndex ? "pi" : index === ciIndex ? "ci" : "other",
    }));
    const bars = basis.map((value, feature) => ({
        feature,
        value,
        manipulated: feature === manipVar,
        included: included.has(feature),
    }));
    let lo = -1;
    let hi = 1;
    for (const row of normalized)
        for (const v of row) {
            if (v < lo)
                lo = v;
            if (v > hi)
                hi = v;
        }
    return { lines, bars, valueRange: [lo, hi] };
}
export const DENSITY_GRID_POINTS = 128;
/** Bandwidth from the pooled scores of the whole path (fixed across frames). */
export function pathBandwidth(tour) {
    const pooled = [];
    for (const frame of tour.frames)
        pooled.push(...frame.scores);
    return silvermanBandwidth(pooled);
}
export function densityGrid(tour, bandwidth) {
    const [lo, hi] = tour.axis_range;
    return makeGrid(lo - 3 * bandwidth, hi + 3 * bandwidth, DENSITY_GRID_POINTS);
}
export function tourView(tour, frameCursor, meta, records, bandwidth, grid, piIndex, ciIndex) {
    const frame = tour.frames[frameCursor];
    const scores = frame.scores;
    const densities = [];
    const observedPoints = [];
    const residualPoints = [];
    if (meta.task === "classification") {
        const levels = meta.levels ?? [];
        for (let c = 0; c < levels.length; c++) {
            const values = records.filter((r) => r.predicted === c).map((r) => scores[r.index]);
            if (values.length === 0)
                continue;
            densities.push({ classIndex: c, label: levels[c], series: gaussianKde(values, grid, bandwidth) });
        }
    }
    else {
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
