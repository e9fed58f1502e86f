/** Shared 2D plot scaffolding: frame, linear axes, tick labels, legend. */

import { Raster, textWidth, type Color } from "./raster.js";

export const AXIS: Color = [40, 40, 40];
export const GRID_BG: Color = [255, 255, 255];

export interface AxisRange {
  min: number;
  max: number;
}

export function padRange(values: number[]): AxisRange {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (!(max > min)) {
    min -= 0.5;
    max += 0.5;
  }
  const pad = (max - min) * 0.05;
  return { min: min - pad, max: max + pad };
}

export interface Frame {
  raster: Raster;
  x0: number;
  y0: number; // top-left of the plot box
  w: number;
  h: number;
  xr: AxisRange;
  yr: AxisRange;
  /** reversed x axis: xr.max on the left */
  xReversed: boolean;
  px(x: number): number;
  py(y: number): number;
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(1);
  return v.toFixed(2);
}

export function makeFrame(
  width: number,
  height: number,
  xr: AxisRange,
  yr: AxisRange,
  opts: { xLabel?: string; yLabel?: string; xReversed?: boolean } = {},
): Frame {
  const raster = new Raster(width, height);
  const x0 = 52;
  const y0 = 14;
  const w = width - x0 - 14;
  const h = height - y0 - 34;
  const xRev = opts.xReversed ?? false;

  const px = (x: number) => {
    const t = (x - xr.min) / (xr.max - xr.min);
    return Math.round(x0 + (xRev ? 1 - t : t) * (w - 1));
  };
  const py = (y: number) => {
    const t = (y - yr.min) / (yr.max - yr.min);
    return Math.round(y0 + (1 - t) * (h - 1));
  };

  // frame box
  raster.line(x0, y0, x0 + w - 1, y0, AXIS);
  raster.line(x0, y0 + h - 1, x0 + w - 1, y0 + h - 1, AXIS);
  raster.line(x0, y0, x0, y0 + h - 1, AXIS);
  raster.line(x0 + w - 1, y0, x0 + w - 1, y0 + h - 1, AXIS);

  // end-point tick labels
  const xlo = xRev ? xr.max : xr.min;
  const xhi = xRev ? xr.min : xr.max;
  raster.text(x0, y0 + h + 4, fmt(xlo), AXIS);
  raster.text(x0 + w - textWidth(fmt(xhi)), y0 + h + 4, fmt(xhi), AXIS);
  raster.text(2, y0, fmt(yr.max), AXIS);
  raster.text(2, y0 + h - 8, fmt(yr.min), AXIS);
  if (opts.xLabel) {
    raster.text(Math.round(x0 + w / 2 - textWidth(opts.xLabel) / 2),
      y0 + h + 16, opts.xLabel, AXIS);
  }
  if (opts.yLabel) {
    raster.text(2, 2, opts.yLabel, AXIS);
  }
  return { raster, x0, y0, w, h, xr, yr, xReversed: xRev, px, py };
}

export function drawLegend(
  frame: Frame,
  entries: { label: string; color: Color }[],
): void {
  let y = frame.y0 + 4;
  for (const { label, color } of entries) {
    const x = frame.x0 + frame.w - textWidth(label) - 22;
    frame.raster.fillRect(x, y + 1, 10, 5, color);
    frame.raster.text(x + 14, y, label, AXIS);
    y += 10;
  }
}
