/** Viewer state machine. All transitions preserve the invariants:
 * PI and CI never coincide, the frame cursor stays within the loaded tour,
 * and the include set always contains the manipulated variable.
 */

export interface ViewerState {
  piIndex: number | null;
  ciIndex: number | null;
  manipVar: number;
  include: number[];
  color: string;
  frameCursor: number;
  frameCount: number;
  playing: boolean;
  brush: number[];
}

export function initialState(p: number, color: string): ViewerState {
  return {
    piIndex: null,
    ciIndex: null,
    manipVar: 0,
    include: Array.from({ length: p }, (_, j) => j),
    color,
    frameCursor: 0,
    frameCount: 0,
    playing: false,
    brush: [],
  };
}

export type Result = { state: ViewerState; rejected?: string };

export function setPi(s: ViewerState, index: number): Result {
  if (index === s.ciIndex) {
    // the comparison point yields to the new primary
    return { state: { ...s, piIndex: index, ciIndex: null } };
  }
  return { state: { ...s, piIndex: index } };
}

export function setCi(s: ViewerState, index: number): Result {
  if (index === s.piIndex) {
    return { state: s, rejected: "comparison must differ from the primary observation" };
  }
  return { state: { ...s, ciIndex: index } };
}

export function clearCi(s: ViewerState): Result {
  return { state: { ...s, ciIndex: null } };
}

export function setManipVar(s: ViewerState, k: number): Result {
  const include = s.include.includes(k) ? s.include : [...s.include, k].sort((a, b) => a - b);
  return { state: { ...s, manipVar: k, include } };
}

export function toggleInclude(s: ViewerState, k: number, p: number): Result {
  if (k === s.manipVar && s.include.includes(k)) {
    return { state: s, rejected: "cannot exclude the manipulated variable" };
  }
  const include = s.include.includes(k)
    ? s.include.filter((j) => j !== k)
    : [...s.include, k].sort((a, b) => a - b);
  if (include.length === 0 || include.length > p) {
    return { state: s, rejected: "include set must keep at least one variable" };
  }
  return { state: { ...s, include } };
}

export function tourLoaded(s: ViewerState, frameCount: number): Result {
  return { state: { ...s, frameCount, frameCursor: 0, playing: false } };
}

export function scrub(s: ViewerState, frame: number): Result {
  const clamped = Math.max(0, Math.min(s.frameCount > 0 ? s.frameCount - 1 : 0, frame));
  return { state: { ...s, frameCursor: clamped } };
}

export function tick(s: ViewerState): Result {
  if (!s.playing || s.frameCount === 0) return { state: s };
  return { state: { ...s, frameCursor: (s.frameCursor + 1) % s.frameCount } };
}

export function setPlaying(s: ViewerState, playing: boolean): Result {
  return { state: { ...s, playing: playing && s.frameCount > 0 } };
}

export function setBrush(s: ViewerState, indices: number[]): Result {
  return { state: { ...s, brush: [...indices] } };
}

export function setColor(s: ViewerState, color: string): Result {
  return { state: { ...s, color } };
}
