/**
 * Client-side mirror of the service's run-request validation.
 *
 * The server checks a request in three layers: field shape (unknown or
 * missing keys, wrong types), value ranges, then the init-point
 * dimension against the chosen objective. A draft rejected here is
 * never sent; a draft accepted here must be accepted by the server.
 * tests/validate.test.ts replays the shared fixture list to hold both
 * sides to that.
 */

import {
  ALPHA0_MAX,
  ALPHA_HIGH_MAX,
  DEFAULT_ITERATION_CAP,
  INIT_POINT_LIMIT,
  MODES,
  OBJECTIVES,
  OPTIMIZERS,
  RunRequest,
  SEED_MAX,
} from "./types.js";

export type VerdictKind = "shape" | "range" | "dimension";

export type Verdict =
  | { ok: true; request: RunRequest }
  | { ok: false; field: string; message: string; kind: VerdictKind };

export interface ValidateOptions {
  /** Server-side iteration cap; the service default unless overridden. */
  iterationCap?: number;
  /** Parameter count per objective name, from GET /api/objectives. */
  dims?: Record<string, number>;
}

const KNOWN_FIELDS = new Set([
  "objective",
  "optimizer",
  "active",
  "alpha0",
  "alpha_low",
  "alpha_high",
  "mode",
  "init_point",
  "iterations",
  "seed",
]);

function reject(field: string, message: string, kind: VerdictKind): Verdict {
  return { ok: false, field, message, kind };
}

function isNumber(v: unknown): v is number {
  return typeof v === "number" && !Number.isNaN(v);
}

/**
 * Parse a field the way the server's lax float parsing does: numbers
 * pass through, numeric strings are coerced, booleans and everything
 * else fail.
 */
function asFloat(v: unknown): number | null {
  if (typeof v === "boolean") return null;
  if (isNumber(v)) return v;
  if (typeof v === "string" && v.trim() !== "") {
    const parsed = Number(v);
    if (!Number.isNaN(parsed)) return parsed;
  }
  return null;
}

/** Integer fields additionally refuse fractional parts. */
function asInt(v: unknown): number | null {
  const parsed = asFloat(v);
  if (parsed === null || !Number.isInteger(parsed)) return null;
  return parsed;
}

export function validateRunRequest(
  body: unknown,
  opts: ValidateOptions = {},
): Verdict {
  const cap = opts.iterationCap ?? DEFAULT_ITERATION_CAP;

  if (typeof body !== "object" || body === null || Array.isArray(body)) {
    return reject("body", "request body must be a JSON object", "shape");
  }
  const record = body as Record<string, unknown>;

  for (const key of Object.keys(record)) {
    if (!KNOWN_FIELDS.has(key)) {
      return reject(key, `unknown field ${key}`, "shape");
    }
  }
  if (!("objective" in record)) {
    return reject("objective", "objective is required", "shape");
  }

  for (const key of ["objective", "optimizer", "mode"]) {
    if (key in record && typeof record[key] !== "string") {
      return reject(key, `${key} must be a string`, "shape");
    }
  }
  if ("active" in record && typeof record.active !== "boolean") {
    return reject("active", "active must be a boolean", "shape");
  }
  for (const key of ["alpha0", "alpha_low", "alpha_high"]) {
    if (key in record && asFloat(record[key]) === null) {
      return reject(key, `${key} must be a number`, "shape");
    }
  }
  for (const key of ["iterations", "seed"]) {
    if (key in record && asInt(record[key]) === null) {
      return reject(key, `${key} must be an integer`, "shape");
    }
  }
  if ("init_point" in record && record.init_point !== null &&
      !Array.isArray(record.init_point)) {
    return reject("init_point", "init_point must be a list or null", "shape");
  }

  const req: RunRequest = {
    objective: record.objective as string,
    optimizer: (record.optimizer as string) ?? "adamw",
    active: (record.active as boolean) ?? false,
    alpha0: "alpha0" in record ? asFloat(record.alpha0)! : 1e-3,
    alpha_low: "alpha_low" in record ? asFloat(record.alpha_low)! : 0.9,
    alpha_high: "alpha_high" in record ? asFloat(record.alpha_high)! : 0.1,
    mode: (record.mode as string) ?? "absolute",
    init_point: "init_point" in record
      ? (record.init_point as unknown[] | null) as number[] | null
      : null,
    iterations: "iterations" in record ? asInt(record.iterations)! : 100,
    seed: "seed" in record ? asInt(record.seed)! : 0,
  };

  if (!(OBJECTIVES as readonly string[]).includes(req.objective)) {
    return reject("objective",
        `unknown objective '${req.objective}'; valid: ${OBJECTIVES.join(", ")}`,
        "range");
  }
  if (!(OPTIMIZERS as readonly string[]).includes(req.optimizer)) {
    return reject("optimizer",
        `unknown optimizer '${req.optimizer}'; valid: ${OPTIMIZERS.join(", ")}`,
        "range");
  }
  if (!(MODES as readonly string[]).includes(req.mode)) {
    return reject("mode",
        `unknown mode '${req.mode}'; valid: ${MODES.join(", ")}`, "range");
  }
  if (!(Number.isFinite(req.alpha0) && req.alpha0 > 0 && req.alpha0 <= ALPHA0_MAX)) {
    return reject("alpha0", `alpha0 must lie in (0, ${ALPHA0_MAX}]`, "range");
  }
  if (!(Number.isFinite(req.alpha_low) && req.alpha_low > 0 && req.alpha_low < 1)) {
    return reject("alpha_low", "alpha_low must lie in (0, 1)", "range");
  }
  if (!(Number.isFinite(req.alpha_high) && req.alpha_high > 0 &&
        req.alpha_high <= ALPHA_HIGH_MAX)) {
    return reject("alpha_high",
        `alpha_high must lie in (0, ${ALPHA_HIGH_MAX}]`, "range");
  }
  if (!(req.iterations >= 0 && req.iterations <= cap)) {
    return reject("iterations", `iterations must lie in [0, ${cap}]`, "range");
  }
  if (!(req.seed >= 0 && req.seed <= SEED_MAX)) {
    return reject("seed", `seed must lie in [0, ${SEED_MAX}]`, "range");
  }
  if (req.init_point !== null) {
    for (const v of req.init_point as unknown[]) {
      if (typeof v === "boolean" || !isNumber(v)) {
        return reject("init_point", "init_point entries must be numbers",
            "range");
      }
      if (!(Number.isFinite(v) && Math.abs(v) <= INIT_POINT_LIMIT)) {
        return reject("init_point",
            `init_point entries must be finite with |v| <= ${INIT_POINT_LIMIT}`,
            "range");
      }
    }
    const dim = opts.dims?.[req.objective];
    if (dim !== undefined && req.init_point.length !== dim) {
      return reject("init_point",
          `objective '${req.objective}' needs ${dim} coordinates, ` +
          `got ${req.init_point.length}`,
          "dimension");
    }
  }

  return { ok: true, request: req };
}
