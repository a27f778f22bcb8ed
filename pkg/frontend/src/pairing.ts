/**
 * Paired submission: every run goes to the service twice, once vanilla
 * and once adaptive, so the two trajectories can be compared on equal
 * terms. At most one pair is live at a time; each submission takes a
 * fresh nonce and responses arriving under an old nonce are reported
 * as stale so the UI never renders them.
 */

import { FetchLike, postRun } from "./api.js";
import { RunRequest, RunResponse } from "./types.js";
import { ValidateOptions, Verdict, validateRunRequest } from "./validate.js";

export type PairResult =
  | { kind: "ok"; vanilla: RunResponse; active: RunResponse }
  | { kind: "rejected"; status: number; field: string | null; message: string }
  | { kind: "stale" }
  | { kind: "network-error"; message: string };

/** The two request bodies differ only in the `active` flag. */
export function buildPair(req: RunRequest): [RunRequest, RunRequest] {
  return [
    { ...req, active: false },
    { ...req, active: true },
  ];
}

export class PairController {
  private nonce = 0;

  constructor(
    private base: string,
    private fetchFn: FetchLike = fetch,
  ) {}

  async submit(req: RunRequest): Promise<PairResult> {
    const token = ++this.nonce;
    const [vanillaReq, activeReq] = buildPair(req);
    let vanilla, active;
    try {
      [vanilla, active] = await Promise.all([
        postRun(this.base, vanillaReq, this.fetchFn),
        postRun(this.base, activeReq, this.fetchFn),
      ]);
    } catch (err) {
      if (token !== this.nonce) return { kind: "stale" };
      return { kind: "network-error", message: String(err) };
    }
    if (token !== this.nonce) return { kind: "stale" };
    if (!vanilla.ok) {
      return { kind: "rejected", status: vanilla.status,
               field: vanilla.field, message: vanilla.message };
    }
    if (!active.ok) {
      return { kind: "rejected", status: active.status,
               field: active.field, message: active.message };
    }
    return { kind: "ok", vanilla: vanilla.body, active: active.body };
  }
}

/**
 * Validate first, submit only on success. An invalid draft therefore
 * never reaches the network; the caller highlights `verdict.field`.
 */
export async function submitValidated(
  controller: PairController,
  body: unknown,
  opts: ValidateOptions = {},
): Promise<{ verdict: Verdict; result: PairResult | null }> {
  const verdict = validateRunRequest(body, opts);
  if (!verdict.ok) return { verdict, result: null };
  return { verdict, result: await controller.submit(verdict.request) };
}
