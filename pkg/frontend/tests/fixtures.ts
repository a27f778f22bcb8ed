/**
 * Loader for the shared request fixture list. The same file drives the
 * service-side tests, so both validators are judged against one text.
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

export interface FixtureCase {
  name: string;
  expect: 200 | 400 | 422;
  field: string | null;
  request: Record<string, unknown>;
}

export interface FixtureFile {
  comment: string;
  iteration_cap: number;
  cases: FixtureCase[];
}

const FIXTURE_PATH = fileURLToPath(
  new URL("../../tests/fixtures/playground_requests.json", import.meta.url),
);

export function loadFixtures(): FixtureFile {
  return JSON.parse(readFileSync(FIXTURE_PATH, "utf-8")) as FixtureFile;
}

/** Parameter counts the fixture comment documents for each objective. */
export const OBJECTIVE_DIMS: Record<string, number> = {
  cubic: 1,
  multimodal: 2,
  saddle: 2,
  quadratic: 2,
  mse_line: 1,
};
