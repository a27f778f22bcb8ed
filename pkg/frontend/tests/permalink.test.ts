import { describe, expect, it } from "vitest";

import {
  DEFAULT_VIEW,
  PlaygroundState,
  decodePermalink,
  permalink,
} from "../src/permalink.js";
import { DEFAULT_DRAFT, Draft } from "../src/types.js";
import { OBJECTIVE_DIMS, loadFixtures } from "./fixtures.js";

const OPTS = {
  iterationCap: loadFixtures().iteration_cap,
  dims: OBJECTIVE_DIMS,
};

function roundTrip(state: PlaygroundState) {
  const url = permalink(state);
  expect(url.startsWith("?")).toBe(true);
  return decodePermalink(url, OPTS);
}

describe("round trips", () => {
  it("restores the default draft", () => {
    const back = roundTrip({ draft: { ...DEFAULT_DRAFT }, view: { ...DEFAULT_VIEW } });
    expect(back.draft).toEqual(DEFAULT_DRAFT);
    expect(back.view).toEqual(DEFAULT_VIEW);
    expect(back.warned).toBe(false);
  });

  it("restores every field of a fully customised state", () => {
    const draft: Draft = {
      objective: "multimodal",
      optimizer: "adabelief",
      alpha0: 0.0123,
      alpha_low: 0.85,
      alpha_high: 0.15,
      mode: "gain",
      init_point: [-3.99, 6.01],
      iterations: 777,
      seed: 424242,
    };
    const view = { logLoss: true, trail: 25 };
    const back = roundTrip({ draft, view });
    expect(back.draft).toEqual(draft);
    expect(back.view).toEqual(view);
    expect(back.warned).toBe(false);
  });

  it("preserves the seed exactly, including the largest one", () => {
    const draft = { ...DEFAULT_DRAFT, seed: 2147483647 };
    const back = roundTrip({ draft, view: { ...DEFAULT_VIEW } });
    expect(back.draft.seed).toBe(2147483647);
  });

  it("keeps awkward float values exact", () => {
    const draft = { ...DEFAULT_DRAFT, alpha0: 1e-7, alpha_low: 0.30000000000000004 };
    const back = roundTrip({ draft, view: { ...DEFAULT_VIEW } });
    expect(back.draft.alpha0).toBe(1e-7);
    expect(back.draft.alpha_low).toBe(0.30000000000000004);
  });

  it("omits the init key when the draft uses the objective default", () => {
    const url = permalink({ draft: { ...DEFAULT_DRAFT }, view: { ...DEFAULT_VIEW } });
    expect(url).not.toContain("init=");
    expect(decodePermalink(url, OPTS).draft.init_point).toBeNull();
  });
});

describe("malformed queries fall back to defaults with a warning", () => {
  it("unparseable number", () => {
    const back = decodePermalink("?alpha0=abc&objective=saddle", OPTS);
    expect(back.draft.alpha0).toBe(DEFAULT_DRAFT.alpha0);
    expect(back.warned).toBe(true);
  });

  it("fractional iteration count", () => {
    const back = decodePermalink("?iterations=2.5", OPTS);
    expect(back.draft.iterations).toBe(DEFAULT_DRAFT.iterations);
    expect(back.warned).toBe(true);
  });

  it("unknown objective", () => {
    const back = decodePermalink("?objective=ackley", OPTS);
    expect(back.draft.objective).toBe(DEFAULT_DRAFT.objective);
    expect(back.warned).toBe(true);
  });

  it("out-of-range value that parses fine", () => {
    const back = decodePermalink("?alpha0=200", OPTS);
    expect(back.draft.alpha0).toBe(DEFAULT_DRAFT.alpha0);
    expect(back.warned).toBe(true);
  });

  it("init point of the wrong length for the chosen objective", () => {
    const back = decodePermalink("?objective=cubic&init=1,2", OPTS);
    expect(back.draft.objective).toBe("cubic");
    expect(back.draft.init_point).toBeNull();
    expect(back.warned).toBe(true);
  });

  it("keeps the good fields while replacing the bad one", () => {
    const back = decodePermalink("?seed=99&alpha0=garbage", OPTS);
    expect(back.draft.seed).toBe(99);
    expect(back.draft.alpha0).toBe(DEFAULT_DRAFT.alpha0);
    expect(back.warned).toBe(true);
  });

  it("ignores unrelated query keys without warning", () => {
    const back = decodePermalink("?utm_source=mail&objective=quadratic", OPTS);
    expect(back.draft.objective).toBe("quadratic");
    expect(back.warned).toBe(false);
  });

  it("empty query is just the defaults", () => {
    const back = decodePermalink("", OPTS);
    expect(back.draft).toEqual(DEFAULT_DRAFT);
    expect(back.warned).toBe(false);
  });

  it("decoded drafts are always valid even from hostile input", () => {
    const back = decodePermalink(
      "?objective=saddle&alpha_low=7&alpha_high=-2&iterations=999999&seed=-5",
      OPTS,
    );
    expect(back.warned).toBe(true);
    expect(back.draft.alpha_low).toBe(DEFAULT_DRAFT.alpha_low);
    expect(back.draft.alpha_high).toBe(DEFAULT_DRAFT.alpha_high);
    expect(back.draft.iterations).toBe(DEFAULT_DRAFT.iterations);
    expect(back.draft.seed).toBe(DEFAULT_DRAFT.seed);
  });

  it("bad view options warn but do not touch the draft", () => {
    const back = decodePermalink("?logloss=maybe&trail=-3", OPTS);
    expect(back.view).toEqual(DEFAULT_VIEW);
    expect(back.draft).toEqual(DEFAULT_DRAFT);
    expect(back.warned).toBe(true);
  });
});
