/** Filled plane renders of a temperature field dump, with a colorbar. */

import { writeFileSync } from "node:fs";

import { colorAt, mapValue, scalePosition } from "./colormap.js";
import { encodePng } from "./png.js";
import { Raster, textWidth, type Color } from "./raster.js";
import { extractSlice, readFieldDump, type FieldDump, type Slice } from "./vtk.js";

const AXIS_COLOR: Color = [40, 40, 40];

export interface SliceRequest {
  axis: "x" | "y" | "z";
  index: number;
  vmin?: number;
  vmax?: number;
}

export interface SliceLayout {
  raster: Raster;
  /** pixels per voxel */
  scale: number;
  /** top-left of the slice image */
  plotX: number;
  plotY: number;
  slice: Slice;
  vmin: number;
  vmax: number;
  /** map a plot pixel back to (col, row) in the slice */
  voxelAt(px: number, py: number): [number, number] | null;
}

export function renderSliceRaster(dump: FieldDump, req: SliceRequest): SliceLayout {
  const slice = extractSlice(dump, req.axis, req.index);
  let vmin = req.vmin ?? Infinity;
  let vmax = req.vmax ?? -Infinity;
  if (req.vmin === undefined || req.vmax === undefined) {
    for (const v of slice.data) {
      if (req.vmin === undefined) vmin = Math.min(vmin, v);
      if (req.vmax === undefined) vmax = Math.max(vmax, v);
    }
  }
  const scale = Math.max(2, Math.floor(480 / Math.max(slice.width, slice.height)));
  const plotX = 10;
  const plotY = 22;
  const plotW = slice.width * scale;
  const plotH = slice.height * scale;
  const barX = plotX + plotW + 16;
  const width = barX + 16 + 8 + 7 * 6 + 10;
  const height = plotY + plotH + 12;
  const raster = new Raster(width, height);

  raster.text(plotX, 6, `${req.axis}=${req.index}  TEMPERATURE C`, AXIS_COLOR);

  // row 0 of the slice sits at the bottom (physical axis orientation)
  for (let row = 0; row < slice.height; row++) {
    for (let col = 0; col < slice.width; col++) {
      const c = mapValue(slice.data[row * slice.width + col], vmin, vmax);
      raster.fillRect(plotX + col * scale,
        plotY + (slice.height - 1 - row) * scale, scale, scale, c);
    }
  }

  // colorbar, top = vmax
  const barH = plotH;
  for (let i = 0; i < barH; i++) {
    const pos = barH === 1 ? 0.5 : 1 - i / (barH - 1);
    const c = vmax > vmin ? colorAt(pos) : colorAt(0.5);
    raster.fillRect(barX, plotY + i, 16, 1, c);
  }
  raster.text(barX + 20, plotY, fmtBar(vmax), AXIS_COLOR);
  raster.text(barX + 20, plotY + barH - 8, fmtBar(vmin), AXIS_COLOR);

  const voxelAt = (px: number, py: number): [number, number] | null => {
    const col = Math.floor((px - plotX) / scale);
    const rowFromTop = Math.floor((py - plotY) / scale);
    if (col < 0 || col >= slice.width || rowFromTop < 0 || rowFromTop >= slice.height) {
      return null;
    }
    return [col, slice.height - 1 - rowFromTop];
  };

  return { raster, scale, plotX, plotY, slice, vmin, vmax, voxelAt };
}

function fmtBar(v: number): string {
  return Math.abs(v) >= 1000 ? v.toExponential(1) : v.toFixed(2);
}

export function renderSlice(dumpPath: string, req: SliceRequest, outPath: string): SliceLayout {
  const dump = readFieldDump(dumpPath);
  const layout = renderSliceRaster(dump, req);
  writeFileSync(outPath,
    encodePng(layout.raster.rgb, layout.raster.width, layout.raster.height));
  return layout;
}
