/**
 * Request/response shapes of the trajectory service, plus the accepted
 * ranges. The constants here must stay equal to the service's; the
 * contract tests replay a shared fixture list against both sides to
 * catch drift.
 */

export const OBJECTIVES = [
  "cubic",
  "multimodal",
  "saddle",
  "quadratic",
  "mse_line",
] as const;

export const OPTIMIZERS = [
  "sgd_momentum",
  "adamw",
  "radam",
  "adabelief",
] as const;

export const MODES = ["absolute", "gain"] as const;

export const ALPHA0_MAX = 100.0;
export const ALPHA_HIGH_MAX = 10.0;
export const SEED_MAX = 2 ** 31 - 1;
export const INIT_POINT_LIMIT = 1e6;
export const DEFAULT_ITERATION_CAP = 10_000;

/** One leg of a paired submission, as sent to POST /api/run. */
export interface RunRequest {
  objective: string;
  optimizer: string;
  active: boolean;
  alpha0: number;
  alpha_low: number;
  alpha_high: number;
  mode: string;
  init_point: number[] | null;
  iterations: number;
  seed: number;
}

/**
 * The user-editable part of a run request. `active` is absent on
 * purpose: every submission runs both variants.
 */
export interface Draft {
  objective: string;
  optimizer: string;
  alpha0: number;
  alpha_low: number;
  alpha_high: number;
  mode: string;
  init_point: number[] | null;
  iterations: number;
  seed: number;
}

export const DEFAULT_DRAFT: Draft = {
  objective: "saddle",
  optimizer: "adamw",
  alpha0: 1e-3,
  alpha_low: 0.9,
  alpha_high: 0.1,
  mode: "absolute",
  init_point: null,
  iterations: 100,
  seed: 0,
};

export function draftToRequest(draft: Draft, active: boolean): RunRequest {
  return { ...draft, active };
}

export interface RunPoint {
  iter: number;
  params: number[];
  loss: number;
  alpha_mean: number;
}

export interface ContourPayload {
  bounds: [[number, number], [number, number]];
  resolution: number;
  values: number[][];
}

export interface CurvePayload {
  bounds: [number, number];
  resolution: number;
  values: number[];
}

export interface RunResponse {
  objective: string;
  dim: number;
  points: RunPoint[];
  diverged: boolean;
  contour: ContourPayload | null;
  curve: CurvePayload | null;
}

export interface ObjectiveInfo {
  name: string;
  dim: number;
  default_init: number[];
  suggested_bounds: [number, number][];
}

/** One entry of the service's 4xx error body ({"detail": [...]}).  */
export interface ErrorDetailItem {
  loc: (string | number)[];
  msg: string;
}
