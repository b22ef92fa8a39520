/** Minimal linear scale helpers for the SVG panels. */
export function linearScale(domain, range) {
    let [d0, d1] = domain;
    if (d0 === d1) {
        d0 -= 0.5;
        d1 += 0.5;
    }
    const k = (range[1] - range[0]) / (d1 - d0);
    const scale = ((v) => range[0] + (v - d0) * k);
    scale.invert = (px) => d0 + (px - range[0]) / k;
    scale.domain = [d0, d1];
    scale.range = range;
    return scale;
}
export function extent(values) {
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of values) {
        if (v < lo)
            lo = v;
        if (v > hi)
            hi = v;
    }
    return lo <= hi ? [lo, hi] : [0, 1];
}
export function padded(range, fraction = 0.05) {
    const pad = (range[1] - range[0]) * fraction || 0.5;
    return [range[0] - pad, range[1] + pad];
}
/** Round tick positions, at most `count`, inside the domain. */
export function ticks(domain, count = 5) {
    const span = domain[1] - domain[0];
    if (span <= 0)
        return [domain[0]];
    const step = Math.pow(10, Math.floor(Math.log10(span / count)));
    const err = (span / count) / step;
    const unit = err >= 7.5 ? step * 10 : err >= 3 ? step * 5 : err >= 1.5 ? step * 2 : step;
    const start = Math.ceil(domain[0] / unit) * unit;
    const out = [];
    for (let v = start; v <= domain[1] + 1e-12; v += unit)
        out.push(+v.toFixed(12));
    return out;
}
