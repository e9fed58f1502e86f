/** Per-entity mean-temperature curves over time. */

import { writeFileSync } from "node:fs";

import { SERIES_COLORS } from "./colormap.js";
import { encodePng } from "./png.js";
import { drawLegend, makeFrame, padRange, type Frame } from "./plot.js";
import { readCellCsv, type EntitySeries } from "./csv.js";

export function renderSeriesFrame(series: EntitySeries[],
  width = 560, height = 360): Frame {
  if (series.length === 0) {
    throw new Error("no entities in the series file");
  }
  const ordered = [...series].sort((a, b) => a.entity.localeCompare(b.entity));
  const xr = padRange(ordered.flatMap((s) => s.time_s));
  const yr = padRange(ordered.flatMap((s) => s.mean_c));
  const frame = makeFrame(width, height, xr, yr,
    { xLabel: "TIME S", yLabel: "MEAN C" });
  ordered.forEach((s, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    for (let k = 1; k < s.time_s.length; k++) {
      frame.raster.line(frame.px(s.time_s[k - 1]), frame.py(s.mean_c[k - 1]),
        frame.px(s.time_s[k]), frame.py(s.mean_c[k]), color);
    }
    if (s.time_s.length === 1) {
      frame.raster.marker(frame.px(s.time_s[0]), frame.py(s.mean_c[0]), color);
    }
  });
  drawLegend(frame, ordered.map((s, i) => ({
    label: s.entity,
    color: SERIES_COLORS[i % SERIES_COLORS.length],
  })));
  return frame;
}

export function renderTimeseries(csvPath: string, outPath: string): Frame {
  const frame = renderSeriesFrame(readCellCsv(csvPath));
  writeFileSync(outPath,
    encodePng(frame.raster.rgb, frame.raster.width, frame.raster.height));
  return frame;
}
