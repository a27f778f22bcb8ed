/**
 * d3 rendering for the playground: contour or curve view of the
 * objective with the paired trajectories on top, plus the loss and
 * step-size history charts. Pure presentation; every number drawn here
 * came out of a service response.
 */

import { AlphaHistory, SeriesPoint, clipTrail } from "./alphaHistory.js";
import { ContourPayload, CurvePayload, RunPoint } from "./types.js";

export const VANILLA_COLOR = "#7a7a7a";
export const ACTIVE_COLOR = "#e0662e";

const PLOT_SIZE = 380;
const CHART_W = 380;
const CHART_H = 180;
const MARGIN = { top: 10, right: 12, bottom: 28, left: 52 };

interface TrailPair {
  vanilla: RunPoint[];
  active: RunPoint[];
  trail: number;
}

function clearAndSvg(el: HTMLElement, w: number, h: number) {
  d3.select(el).selectAll("*").remove();
  return d3
    .select(el)
    .append("svg")
    .attr("viewBox", `0 0 ${w} ${h}`)
    .attr("width", "100%");
}

type Selection = ReturnType<typeof d3.select>;

function drawTrail(
  g: Selection,
  pts: RunPoint[],
  toXY: (p: RunPoint) => [number, number],
  color: string,
  trail: number,
) {
  const shown = clipTrail(pts, trail);
  if (shown.length === 0) return;
  const line = d3
    .line<RunPoint>()
    .x((p: RunPoint) => toXY(p)[0])
    .y((p: RunPoint) => toXY(p)[1]);
  g.append("path")
    .attr("d", line(shown))
    .attr("fill", "none")
    .attr("stroke", color)
    .attr("stroke-width", 1.6)
    .attr("stroke-opacity", 0.85);
  const [sx, sy] = toXY(shown[0]);
  g.append("circle")
    .attr("cx", sx)
    .attr("cy", sy)
    .attr("r", 3.5)
    .attr("fill", "none")
    .attr("stroke", color)
    .attr("stroke-width", 1.5);
  const [ex, ey] = toXY(shown[shown.length - 1]);
  g.append("circle")
    .attr("cx", ex)
    .attr("cy", ey)
    .attr("r", 4)
    .attr("fill", color);
}

/** Two-parameter objectives: filled contour bands plus both trails. */
export function renderContour(
  el: HTMLElement,
  payload: ContourPayload,
  trails: TrailPair,
) {
  const n = payload.resolution;
  const [[xLo, xHi], [yLo, yHi]] = payload.bounds;
  const flat: number[] = [];
  for (const row of payload.values) for (const v of row) flat.push(v);

  const sorted = flat.slice().sort(d3.ascending);
  const thresholds = Array.from(
    new Set(
      d3.range(0.02, 0.99, 0.075).map((q) => d3.quantile(sorted, q) as number),
    ),
  ).sort(d3.ascending);

  const contours = d3.contours().size([n, n]).thresholds(thresholds)(flat);
  const color = d3
    .scaleSequential(d3.interpolateBlues)
    .domain([thresholds.length + 4, -2]);

  const svg = clearAndSvg(el, PLOT_SIZE, PLOT_SIZE);
  // Grid row r holds y index r with yLo at r=0, so pixel y must flip.
  const projection = d3
    .geoIdentity()
    .reflectY(true)
    .scale(PLOT_SIZE / (n - 1))
    .translate([0, PLOT_SIZE]);
  const path = d3.geoPath(projection);

  svg
    .append("g")
    .selectAll("path")
    .data(contours)
    .join("path")
    .attr("d", (d: object) => path(d))
    .attr("fill", (_d: object, i: number) => color(i))
    .attr("stroke", "#ffffff")
    .attr("stroke-width", 0.5);

  const xScale = d3.scaleLinear().domain([xLo, xHi]).range([0, PLOT_SIZE]);
  const yScale = d3.scaleLinear().domain([yLo, yHi]).range([PLOT_SIZE, 0]);
  const toXY = (p: RunPoint): [number, number] => [
    xScale(p.params[0]),
    yScale(p.params[1]),
  ];
  const g = svg.append("g");
  drawTrail(g, trails.vanilla, toXY, VANILLA_COLOR, trails.trail);
  drawTrail(g, trails.active, toXY, ACTIVE_COLOR, trails.trail);
}

/** One-parameter objectives: loss curve with (x, loss) trail dots. */
export function renderCurve(
  el: HTMLElement,
  payload: CurvePayload,
  trails: TrailPair,
) {
  const [lo, hi] = payload.bounds;
  const xs = d3.range(payload.resolution).map(
    (i) => lo + ((hi - lo) * i) / (payload.resolution - 1),
  );

  const svg = clearAndSvg(el, PLOT_SIZE, PLOT_SIZE);
  const inner = svg
    .append("g")
    .attr("transform", `translate(${MARGIN.left},${MARGIN.top})`);
  const w = PLOT_SIZE - MARGIN.left - MARGIN.right;
  const h = PLOT_SIZE - MARGIN.top - MARGIN.bottom;

  const allLosses = payload.values.concat(
    trails.vanilla.map((p) => p.loss),
    trails.active.map((p) => p.loss),
  );
  const xScale = d3.scaleLinear().domain([lo, hi]).range([0, w]);
  const yScale = d3
    .scaleLinear()
    .domain([d3.min(allLosses) as number, d3.max(allLosses) as number])
    .nice()
    .range([h, 0]);

  inner
    .append("g")
    .attr("transform", `translate(0,${h})`)
    .call(d3.axisBottom(xScale).ticks(6));
  inner.append("g").call(d3.axisLeft(yScale).ticks(6));

  const line = d3
    .line<number>()
    .x((_v: number, i: number) => xScale(xs[i]))
    .y((v: number) => yScale(v));
  inner
    .append("path")
    .attr("d", line(payload.values))
    .attr("fill", "none")
    .attr("stroke", "#9db8d2")
    .attr("stroke-width", 1.5);

  const toXY = (p: RunPoint): [number, number] => [
    xScale(p.params[0]),
    yScale(p.loss),
  ];
  const g = inner.append("g");
  drawTrail(g, trails.vanilla, toXY, VANILLA_COLOR, trails.trail);
  drawTrail(g, trails.active, toXY, ACTIVE_COLOR, trails.trail);
}

function lineChart(
  el: HTMLElement,
  series: { points: SeriesPoint[]; color: string }[],
  logScale: boolean,
) {
  const svg = clearAndSvg(el, CHART_W, CHART_H);
  const inner = svg
    .append("g")
    .attr("transform", `translate(${MARGIN.left},${MARGIN.top})`);
  const w = CHART_W - MARGIN.left - MARGIN.right;
  const h = CHART_H - MARGIN.top - MARGIN.bottom;

  const iters = series.flatMap((s) => s.points.map((p) => p.iter));
  const values = series.flatMap((s) => s.points.map((p) => p.value));
  const xScale = d3
    .scaleLinear()
    .domain([d3.min(iters) ?? 0, d3.max(iters) ?? 1])
    .range([0, w]);
  // Symlog rather than log so losses that cross zero still plot.
  const yScale = (logScale ? d3.scaleSymlog() : d3.scaleLinear())
    .domain([d3.min(values) ?? 0, d3.max(values) ?? 1])
    .nice()
    .range([h, 0]);

  inner
    .append("g")
    .attr("transform", `translate(0,${h})`)
    .call(d3.axisBottom(xScale).ticks(6));
  inner.append("g").call(d3.axisLeft(yScale).ticks(5, "~g"));

  const line = d3
    .line<SeriesPoint>()
    .x((p: SeriesPoint) => xScale(p.iter))
    .y((p: SeriesPoint) => yScale(p.value));
  for (const s of series) {
    if (s.points.length === 0) continue;
    inner
      .append("path")
      .attr("d", line(s.points))
      .attr("fill", "none")
      .attr("stroke", s.color)
      .attr("stroke-width", 1.6);
  }
}

export function renderLossChart(
  el: HTMLElement,
  vanilla: SeriesPoint[],
  active: SeriesPoint[],
  logScale: boolean,
) {
  lineChart(
    el,
    [
      { points: vanilla, color: VANILLA_COLOR },
      { points: active, color: ACTIVE_COLOR },
    ],
    logScale,
  );
}

export function renderAlphaChart(
  el: HTMLElement,
  vanilla: AlphaHistory,
  active: AlphaHistory,
) {
  if (vanilla.kind === "empty" && active.kind === "empty") {
    d3.select(el).selectAll("*").remove();
    d3.select(el)
      .append("p")
      .attr("class", "empty-state")
      .text(vanilla.message);
    return;
  }
  lineChart(
    el,
    [
      {
        points: vanilla.kind === "series" ? vanilla.series : [],
        color: VANILLA_COLOR,
      },
      {
        points: active.kind === "series" ? active.series : [],
        color: ACTIVE_COLOR,
      },
    ],
    false,
  );
}
