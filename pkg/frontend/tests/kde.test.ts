import assert from "node:assert/strict";
import { test } from "node:test";

import {
  gaussianKde, integrate, makeGrid, mean, sampleSd, silvermanBandwidth,
} from "../src/kde.js";

test("mean and sample sd match hand values", () => {
  assert.equal(mean([1, 2, 3]), 2);
  assert.ok(Math.abs(sampleSd([1, 2, 3]) - 1) < 1e-12);
});

test("silverman bandwidth matches the formula on a known sample", () => {
  // 0..99: sd = sqrt(sum((i-49.5)^2)/99), iqr = 49.5 -> min(sd, iqr/1.34)
  const values = Array.from({ length: 100 }, (_, i) => i);
  const sd = sampleSd(values);
  const spread = Math.min(sd, 49.5 / 1.34);
  const expected = 0.9 * spread * Math.pow(100, -0.2);
  assert.ok(Math.abs(silvermanBandwidth(values) - expected) < 1e-12);
});

test("density integrates to 1 on a generous grid", () => {
  const rng = (() => {
    let s = 1234567;
    return () => {
      // xorshift: deterministic pseudo-random values for the test
      s ^= s << 13; s ^= s >> 17; s ^= s << 5;
      return ((s >>> 0) / 4294967296) * 4 - 2;
    };
  })();
  const values = Array.from({ length: 400 }, rng);
  const h = silvermanBandwidth(values);
  const grid = makeGrid(Math.min(...values) - 4 * h, Math.max(...values) + 4 * h, 256);
  const total = integrate(gaussianKde(values, grid, h));
  assert.ok(Math.abs(total - 1) < 0.01, `integral ${total}`);
});

test("bimodal sample keeps unit mass", () => {
  const values = [
    ...Array.from({ length: 50 }, (_, i) => -3 + (i % 10) * 0.05),
    ...Array.from({ length: 50 }, (_, i) => 2 + (i % 10) * 0.05),
  ];
  const h = silvermanBandwidth(values);
  const grid = makeGrid(-3 - 4 * h, 2.5 + 4 * h, 400);
  const total = integrate(gaussianKde(values, grid, h));
  assert.ok(Math.abs(total - 1) < 0.01, `integral ${total}`);
});
