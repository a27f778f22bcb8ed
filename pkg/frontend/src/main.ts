/**
 * Wires the form, the paired-run controller, and the charts together.
 * Flow: read the form into a draft, validate it locally, send the
 * vanilla/adaptive pair, render whichever responses are not stale.
 */

import { dimsFromObjectives, fetchObjectives } from "./api.js";
import { describeAlphaHistory, lossSeries } from "./alphaHistory.js";
import {
  ACTIVE_COLOR,
  VANILLA_COLOR,
  renderAlphaChart,
  renderContour,
  renderCurve,
  renderLossChart,
} from "./charts.js";
import { PairController, submitValidated } from "./pairing.js";
import {
  DEFAULT_VIEW,
  ViewOptions,
  decodePermalink,
  permalink,
} from "./permalink.js";
import {
  DEFAULT_ITERATION_CAP,
  Draft,
  MODES,
  OPTIMIZERS,
  ObjectiveInfo,
  RunResponse,
  draftToRequest,
} from "./types.js";
import { validateRunRequest } from "./validate.js";

const SERVICE_BASE = "";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const controller = new PairController(SERVICE_BASE);
let objectives: ObjectiveInfo[] = [];
let dims: Record<string, number> = {};
let view: ViewOptions = { ...DEFAULT_VIEW };
let lastPair: { vanilla: RunResponse; active: RunResponse } | null = null;

function setStatus(text: string, cls = "") {
  const status = el<HTMLParagraphElement>("status");
  status.textContent = text;
  status.className = cls;
}

function setWarning(text: string | null) {
  const banner = el<HTMLDivElement>("warning");
  banner.textContent = text ?? "";
  banner.style.display = text ? "block" : "none";
}

function clearFieldErrors() {
  document.querySelectorAll(".field-error").forEach((node) => {
    node.classList.remove("field-error");
  });
  el<HTMLParagraphElement>("field-message").textContent = "";
}

function highlightField(field: string | null, message: string) {
  clearFieldErrors();
  if (field) {
    const wrapper = document.querySelector(`[data-field="${field}"]`);
    if (wrapper) wrapper.classList.add("field-error");
  }
  el<HTMLParagraphElement>("field-message").textContent = message;
}

function formBody(): Record<string, unknown> {
  const initRaw = el<HTMLInputElement>("init").value.trim();
  let init_point: unknown = null;
  if (initRaw !== "") {
    // Entries that fail to parse stay as strings so validation points
    // at init_point the same way the server would.
    init_point = initRaw.split(",").map((part) => {
      const v = Number(part.trim());
      return part.trim() !== "" && !Number.isNaN(v) ? v : part.trim();
    });
  }
  return {
    objective: el<HTMLSelectElement>("objective").value,
    optimizer: el<HTMLSelectElement>("optimizer").value,
    mode: el<HTMLSelectElement>("mode").value,
    alpha0: el<HTMLInputElement>("alpha0").value,
    alpha_low: el<HTMLInputElement>("alpha-low").value,
    alpha_high: el<HTMLInputElement>("alpha-high").value,
    init_point,
    iterations: el<HTMLInputElement>("iterations").value,
    seed: el<HTMLInputElement>("seed").value,
  };
}

function applyDraft(draft: Draft) {
  el<HTMLSelectElement>("objective").value = draft.objective;
  el<HTMLSelectElement>("optimizer").value = draft.optimizer;
  el<HTMLSelectElement>("mode").value = draft.mode;
  el<HTMLInputElement>("alpha0").value = String(draft.alpha0);
  el<HTMLInputElement>("alpha-low").value = String(draft.alpha_low);
  el<HTMLInputElement>("alpha-high").value = String(draft.alpha_high);
  el<HTMLInputElement>("init").value =
    draft.init_point === null ? "" : draft.init_point.map(String).join(", ");
  el<HTMLInputElement>("iterations").value = String(draft.iterations);
  el<HTMLInputElement>("seed").value = String(draft.seed);
  el<HTMLInputElement>("logloss").checked = view.logLoss;
  el<HTMLInputElement>("trail").value = String(view.trail);
}

function updateInitPlaceholder() {
  const name = el<HTMLSelectElement>("objective").value;
  const info = objectives.find((o) => o.name === name);
  el<HTMLInputElement>("init").placeholder = info
    ? `default: ${info.default_init.join(", ")}`
    : "comma-separated coordinates";
}

function badge(resp: RunResponse, label: string, color: string): string {
  const last = resp.points[resp.points.length - 1];
  const where = last ? last.params.map((v) => v.toPrecision(4)).join(", ") : "?";
  const loss = last ? last.loss.toPrecision(4) : "?";
  const divergedTag = resp.diverged
    ? ' <span class="badge diverged">diverged, trail truncated</span>'
    : "";
  return (
    `<span class="legend-chip" style="background:${color}"></span>` +
    `<strong>${label}</strong> final (${where}), loss ${loss}${divergedTag}`
  );
}

function render() {
  if (!lastPair) return;
  const { vanilla, active } = lastPair;
  const plot = el<HTMLDivElement>("plot");
  const trails = {
    vanilla: vanilla.points,
    active: active.points,
    trail: view.trail,
  };
  if (vanilla.contour) {
    renderContour(plot, vanilla.contour, trails);
  } else if (vanilla.curve) {
    renderCurve(plot, vanilla.curve, trails);
  }
  renderLossChart(
    el<HTMLDivElement>("loss-chart"),
    lossSeries(vanilla.points),
    lossSeries(active.points),
    view.logLoss,
  );
  renderAlphaChart(
    el<HTMLDivElement>("alpha-chart"),
    describeAlphaHistory(vanilla.points),
    describeAlphaHistory(active.points),
  );
  el<HTMLDivElement>("summary").innerHTML =
    `<p>${badge(vanilla, "vanilla", VANILLA_COLOR)}</p>` +
    `<p>${badge(active, "adaptive", ACTIVE_COLOR)}</p>`;
}

function currentStateForLink() {
  const verdict = validateRunRequest(formBody(), {
    dims,
    iterationCap: DEFAULT_ITERATION_CAP,
  });
  if (!verdict.ok) return null;
  const { active: _active, ...draft } = verdict.request;
  return { draft, view };
}

async function submit() {
  clearFieldErrors();
  setStatus("running...", "busy");
  const { verdict, result } = await submitValidated(controller, formBody(), {
    dims,
    iterationCap: DEFAULT_ITERATION_CAP,
  });
  if (!verdict.ok || result === null) {
    setStatus("");
    if (!verdict.ok) highlightField(verdict.field, verdict.message);
    return;
  }
  switch (result.kind) {
    case "stale":
      return;
    case "network-error":
      setStatus(`service unreachable: ${result.message}`, "error");
      return;
    case "rejected":
      setStatus(`rejected by the service (${result.status})`, "error");
      highlightField(result.field, result.message);
      return;
    case "ok": {
      lastPair = { vanilla: result.vanilla, active: result.active };
      setStatus("");
      render();
      const state = currentStateForLink();
      if (state) {
        const url = permalink(state, window.location.pathname);
        window.history.replaceState(null, "", url);
      }
      return;
    }
  }
}

function share() {
  const state = currentStateForLink();
  if (!state) {
    setStatus("fix the highlighted field before sharing", "error");
    return;
  }
  const url =
    window.location.origin + permalink(state, window.location.pathname);
  const box = el<HTMLInputElement>("share-url");
  box.value = url;
  box.style.display = "block";
  box.select();
  if (navigator.clipboard) {
    navigator.clipboard.writeText(url).catch(() => {});
  }
}

function fillSelect(id: string, names: readonly string[]) {
  const select = el<HTMLSelectElement>(id);
  select.innerHTML = "";
  for (const name of names) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    select.appendChild(opt);
  }
}

async function init() {
  fillSelect("optimizer", OPTIMIZERS);
  fillSelect("mode", MODES);

  try {
    objectives = await fetchObjectives(SERVICE_BASE);
  } catch (err) {
    setStatus(`service unreachable: ${err}`, "error");
    objectives = [];
  }
  dims = dimsFromObjectives(objectives);
  fillSelect(
    "objective",
    objectives.length > 0 ? objectives.map((o) => o.name) : ["saddle"],
  );

  const decoded = decodePermalink(window.location.search, {
    dims,
    iterationCap: DEFAULT_ITERATION_CAP,
  });
  view = decoded.view;
  applyDraft(decoded.draft);
  updateInitPlaceholder();
  setWarning(
    decoded.warned
      ? "part of the link could not be restored; defaults were used"
      : null,
  );

  el<HTMLButtonElement>("run").addEventListener("click", submit);
  el<HTMLButtonElement>("share").addEventListener("click", share);
  el<HTMLSelectElement>("objective").addEventListener("change", () => {
    el<HTMLInputElement>("init").value = "";
    updateInitPlaceholder();
  });
  el<HTMLInputElement>("logloss").addEventListener("change", (e) => {
    view.logLoss = (e.target as HTMLInputElement).checked;
    render();
  });
  el<HTMLInputElement>("trail").addEventListener("change", (e) => {
    const v = Number((e.target as HTMLInputElement).value);
    view.trail = Number.isInteger(v) && v >= 0 ? v : 0;
    render();
  });
  document.querySelectorAll("#controls input").forEach((node) => {
    node.addEventListener("keydown", (e) => {
      if ((e as KeyboardEvent).key === "Enter") submit();
    });
  });

  if (objectives.length > 0) {
    await submit();
  }
}

init();
