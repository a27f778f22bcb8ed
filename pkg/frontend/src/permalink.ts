/**
 * Encode the playground state in a query string so a configuration can
 * be shared as a URL. Decoding is forgiving: a field that fails to
 * parse, or parses but would be rejected by validation, falls back to
 * its default and raises the `warned` flag so the UI can say the link
 * was only partially restored. Unknown query keys are ignored. The
 * decoded draft is always valid.
 */

import { validateRunRequest, ValidateOptions } from "./validate.js";
import { DEFAULT_DRAFT, Draft, draftToRequest } from "./types.js";

export interface ViewOptions {
  /** Plot the loss chart on a log scale. */
  logLoss: boolean;
  /** How many trailing points to draw; 0 means the whole trajectory. */
  trail: number;
}

export const DEFAULT_VIEW: ViewOptions = { logLoss: false, trail: 0 };

export interface PlaygroundState {
  draft: Draft;
  view: ViewOptions;
}

export interface DecodedState extends PlaygroundState {
  /** True when any part of the query string was dropped or replaced. */
  warned: boolean;
}

const TRAIL_MAX = 100_000;
const KNOWN_DRAFT_FIELDS = Object.keys(DEFAULT_DRAFT);

export function permalink(state: PlaygroundState, base = ""): string {
  const q = new URLSearchParams();
  const d = state.draft;
  q.set("objective", d.objective);
  q.set("optimizer", d.optimizer);
  q.set("alpha0", String(d.alpha0));
  q.set("alpha_low", String(d.alpha_low));
  q.set("alpha_high", String(d.alpha_high));
  q.set("mode", d.mode);
  if (d.init_point !== null) {
    q.set("init", d.init_point.map(String).join(","));
  }
  q.set("iterations", String(d.iterations));
  q.set("seed", String(d.seed));
  if (state.view.logLoss !== DEFAULT_VIEW.logLoss) {
    q.set("logloss", state.view.logLoss ? "1" : "0");
  }
  if (state.view.trail !== DEFAULT_VIEW.trail) {
    q.set("trail", String(state.view.trail));
  }
  return `${base}?${q.toString()}`;
}

function parseNumber(raw: string): number | null {
  if (raw.trim() === "") return null;
  const v = Number(raw);
  return Number.isFinite(v) ? v : null;
}

function parseInteger(raw: string): number | null {
  const v = parseNumber(raw);
  return v !== null && Number.isInteger(v) ? v : null;
}

function parsePoint(raw: string): number[] | null {
  const parts = raw.split(",").map(parseNumber);
  if (parts.length === 0 || parts.some((p) => p === null)) return null;
  return parts as number[];
}

export function decodePermalink(
  query: string,
  opts: ValidateOptions = {},
): DecodedState {
  const q = new URLSearchParams(query);
  const draft: Draft = { ...DEFAULT_DRAFT };
  const view: ViewOptions = { ...DEFAULT_VIEW };
  let warned = false;

  const take = <K extends keyof Draft>(
    key: K,
    param: string,
    parse: (raw: string) => Draft[K] | null,
  ) => {
    const raw = q.get(param);
    if (raw === null) return;
    const value = parse(raw);
    if (value === null) {
      warned = true;
    } else {
      draft[key] = value;
    }
  };

  take("objective", "objective", (s) => s);
  take("optimizer", "optimizer", (s) => s);
  take("mode", "mode", (s) => s);
  take("alpha0", "alpha0", parseNumber);
  take("alpha_low", "alpha_low", parseNumber);
  take("alpha_high", "alpha_high", parseNumber);
  take("iterations", "iterations", parseInteger);
  take("seed", "seed", parseInteger);
  take("init_point", "init", parsePoint);

  const logloss = q.get("logloss");
  if (logloss !== null) {
    if (logloss === "0" || logloss === "1") view.logLoss = logloss === "1";
    else warned = true;
  }
  const trail = q.get("trail");
  if (trail !== null) {
    const v = parseInteger(trail);
    if (v !== null && v >= 0 && v <= TRAIL_MAX) view.trail = v;
    else warned = true;
  }

  // A field can parse yet still be out of range (alpha0=200) or clash
  // with another (init point of the wrong length after an objective
  // change). Revert offenders one at a time; defaults are valid, so
  // this terminates.
  for (let guard = 0; guard < KNOWN_DRAFT_FIELDS.length + 1; guard++) {
    const verdict = validateRunRequest(draftToRequest(draft, false), opts);
    if (verdict.ok) break;
    warned = true;
    const field = verdict.field as keyof Draft;
    if (field in draft) {
      draft[field] = DEFAULT_DRAFT[field] as never;
    } else {
      return { draft: { ...DEFAULT_DRAFT }, view, warned: true };
    }
  }

  return { draft, view, warned };
}
