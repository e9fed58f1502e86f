/** Final stack temperature against terminal voltage (decreasing axis). */

import { writeFileSync } from "node:fs";

import { CsvSchemaError, readSweepCsv, type SweepPoint } from "./csv.js";
import { encodePng } from "./png.js";
import { makeFrame, padRange, type Frame } from "./plot.js";

const MARKER: [number, number, number] = [214, 39, 40];
const LINE: [number, number, number] = [31, 119, 180];

export function renderTvvFrame(points: SweepPoint[], entity = "pem",
  width = 560, height = 360): Frame {
  const rows = points.filter((p) => p.entity === entity);
  if (rows.length === 0) {
    throw new CsvSchemaError(`no rows for entity "${entity}" in the sweep`);
  }
  const seen = new Set<number>();
  for (const r of rows) {
    if (seen.has(r.pem_voltage_v)) {
      throw new CsvSchemaError(
        `duplicate voltage ${r.pem_voltage_v} V for entity "${entity}"`);
    }
    seen.add(r.pem_voltage_v);
  }
  const ordered = [...rows].sort((a, b) => b.pem_voltage_v - a.pem_voltage_v);
  const xr = padRange(ordered.map((p) => p.pem_voltage_v));
  const yr = padRange(ordered.map((p) => p.mean_c));
  const frame = makeFrame(width, height, xr, yr,
    { xLabel: "CELL VOLTAGE V", yLabel: "MEAN C", xReversed: true });
  for (let k = 1; k < ordered.length; k++) {
    frame.raster.line(
      frame.px(ordered[k - 1].pem_voltage_v), frame.py(ordered[k - 1].mean_c),
      frame.px(ordered[k].pem_voltage_v), frame.py(ordered[k].mean_c), LINE);
  }
  for (const p of ordered) {
    frame.raster.marker(frame.px(p.pem_voltage_v), frame.py(p.mean_c), MARKER);
  }
  return frame;
}

export function renderTempVsVoltage(csvPath: string, outPath: string,
  entity = "pem"): Frame {
  const frame = renderTvvFrame(readSweepCsv(csvPath), entity);
  writeFileSync(outPath,
    encodePng(frame.raster.rgb, frame.raster.width, frame.raster.height));
  return frame;
}
