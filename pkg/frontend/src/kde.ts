/** Gaussian kernel density estimation for the classification tour view.
 *
 * The bandwidth is Silverman's rule computed once on the pooled scores of the
 * whole tour path, so density shapes stay comparable while the animation
 * plays. The evaluation grid spans the tour's fixed axis range padded by
 * three bandwidths, which keeps essentially all mass on the grid.
 */

const SQRT_2PI = Math.sqrt(2 * Math.PI);

export function mean(values: number[]): number {
  let s = 0;
  for (const v of values) s += v;
  return s / values.length;
}

export function sampleSd(values: number[]): number {
  if (values.length < 2) return 0;
  const m = mean(values);
  let s = 0;
  for (const v of values) s += (v - m) * (v - m);
  return Math.sqrt(s / (values.length - 1));
}

function quantile(sorted: number[], q: number): number {
  const pos = (sorted.length - 1) * q;
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
}

export function silvermanBandwidth(values: number[]): number {
  const sd = sampleSd(values);
  const sorted = [...values].sort((a, b) => a - b);
  const iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  const spread = Math.min(sd, iqr / 1.34) || sd || 1;
  return 0.9 * spread * Math.pow(values.length, -0.2);
}

export interface DensitySeries {
  grid: number[];
  density: number[];
}

export function gaussianKde(values: number[], grid: number[], bandwidth: number): DensitySeries {
  const h = bandwidth > 0 ? bandwidth : 1;
  const norm = 1 / (values.length * h * SQRT_2PI);
  const density = grid.map((g) => {
    let s = 0;
    for (const v of values) {
      const u = (g - v) / h;
      s += Math.exp(-0.5 * u * u);
    }
    return s * norm;
  });
  return { grid, density };
}

export function makeGrid(lo: number, hi: number, points: number): number[] {
  const step = (hi - lo) / (points - 1);
  return Array.from({ length: points }, (_, i) => lo + i * step);
}

/** Trapezoid integral of a density series over its grid. */
export function integrate(series: DensitySeries): number {
  let total = 0;
  for (let i = 1; i < series.grid.length; i++) {
    total += 0.5 * (series.density[i] + series.density[i - 1])
      * (series.grid[i] - series.grid[i - 1]);
  }
  return total;
}
