/**
 * Thin fetch wrapper for the trajectory service. All numeric results
 * come from here; the playground itself never steps an optimizer.
 */

import { ErrorDetailItem, ObjectiveInfo, RunRequest, RunResponse } from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export type RunResult =
  | { ok: true; body: RunResponse }
  | { ok: false; status: number; field: string | null; message: string };

/** First named field in a 4xx detail list, skipping the "body" prefix. */
export function offendingField(detail: ErrorDetailItem[] | undefined): string | null {
  if (!detail) return null;
  for (const item of detail) {
    for (const part of item.loc) {
      if (typeof part === "string" && part !== "body") return part;
    }
  }
  return null;
}

export async function postRun(
  base: string,
  req: RunRequest,
  fetchFn: FetchLike = fetch,
): Promise<RunResult> {
  const resp = await fetchFn(`${base}/api/run`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(req),
  });
  if (resp.status === 200) {
    return { ok: true, body: (await resp.json()) as RunResponse };
  }
  let detail: ErrorDetailItem[] | undefined;
  try {
    detail = ((await resp.json()) as { detail?: ErrorDetailItem[] }).detail;
  } catch {
    detail = undefined;
  }
  return {
    ok: false,
    status: resp.status,
    field: offendingField(detail),
    message: detail?.[0]?.msg ?? `request failed with status ${resp.status}`,
  };
}

export async function fetchObjectives(
  base: string,
  fetchFn: FetchLike = fetch,
): Promise<ObjectiveInfo[]> {
  const resp = await fetchFn(`${base}/api/objectives`);
  if (resp.status !== 200) {
    throw new Error(`objective list failed with status ${resp.status}`);
  }
  const body = (await resp.json()) as { objectives: ObjectiveInfo[] };
  return body.objectives;
}

export function dimsFromObjectives(
  infos: ObjectiveInfo[],
): Record<string, number> {
  const dims: Record<string, number> = {};
  for (const info of infos) dims[info.name] = info.dim;
  return dims;
}
