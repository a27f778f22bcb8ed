/**
 * The page loads the vendored d3 bundle (vendor/d3.min.js) as a plain
 * script, so `d3` is a page global rather than an import. Only the
 * entry points the charts touch are declared; the builder chains are
 * left loose because the real typings live in @types/d3, which is not
 * vendored.
 */

declare const d3: {
  select(node: Element | null): any;
  scaleLinear(): any;
  scaleSymlog(): any;
  scaleSequential(interpolator: (t: number) => string): any;
  interpolateBlues(t: number): string;
  line<T = unknown>(): any;
  axisBottom(scale: any): any;
  axisLeft(scale: any): any;
  contours(): any;
  geoPath(projection?: any): any;
  geoIdentity(): any;
  range(start: number, stop?: number, step?: number): number[];
  quantile(sorted: number[], q: number): number | undefined;
  ascending(a: number, b: number): number;
  min(values: number[]): number | undefined;
  max(values: number[]): number | undefined;
};
