/**
 * Series extraction for the step-size and loss charts. Pure data
 * shaping; the values themselves always come from the service.
 */

import { RunPoint } from "./types.js";

export interface SeriesPoint {
  iter: number;
  value: number;
}

export const EMPTY_MESSAGE = "no points to plot";

export type AlphaHistory =
  | { kind: "empty"; message: string }
  | { kind: "series"; series: SeriesPoint[]; flat: boolean };

export function alphaSeries(points: RunPoint[]): SeriesPoint[] {
  return points.map((p) => ({ iter: p.iter, value: p.alpha_mean }));
}

export function lossSeries(points: RunPoint[]): SeriesPoint[] {
  return points.map((p) => ({ iter: p.iter, value: p.loss }));
}

/**
 * A vanilla run keeps one constant step size, so its history plots as
 * a flat line; the adaptive run's mean moves at every epoch boundary.
 */
export function describeAlphaHistory(points: RunPoint[]): AlphaHistory {
  if (points.length === 0) {
    return { kind: "empty", message: EMPTY_MESSAGE };
  }
  const series = alphaSeries(points);
  const first = series[0].value;
  const flat = series.every((p) => p.value === first);
  return { kind: "series", series, flat };
}

/**
 * Length of the leading run of non-decreasing values. While every
 * parameter keeps a consistent gradient sign the adaptive mean only
 * grows, so this counts the iterations before the first shrink.
 */
export function nonDecreasingPrefixLength(series: SeriesPoint[]): number {
  let n = series.length > 0 ? 1 : 0;
  for (let i = 1; i < series.length; i++) {
    if (series[i].value < series[i - 1].value) break;
    n = i + 1;
  }
  return n;
}

/** Drop all but the last `trail` points; 0 keeps everything. */
export function clipTrail<T>(points: T[], trail: number): T[] {
  if (trail <= 0 || points.length <= trail) return points;
  return points.slice(points.length - trail);
}
