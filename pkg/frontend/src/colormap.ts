/** Thermal colormap: cold navy through cyan and yellow to hot crimson. */

import type { Color } from "./raster.js";

const STOPS: Color[] = [
  [10, 10, 96],
  [28, 93, 191],
  [66, 188, 212],
  [205, 227, 97],
  [246, 153, 38],
  [212, 27, 27],
];

/**
 * Normalized scale position of a value; monotone in the value, clamped to
 * [0, 1].  A degenerate range maps everything to 0.5.
 */
export function scalePosition(value: number, vmin: number, vmax: number): number {
  if (!(vmax > vmin)) return 0.5;
  return Math.min(1, Math.max(0, (value - vmin) / (vmax - vmin)));
}

export function colorAt(position: number): Color {
  const t = Math.min(1, Math.max(0, position)) * (STOPS.length - 1);
  const i = Math.min(STOPS.length - 2, Math.floor(t));
  const f = t - i;
  const a = STOPS[i];
  const b = STOPS[i + 1];
  return [
    Math.round(a[0] + f * (b[0] - a[0])),
    Math.round(a[1] + f * (b[1] - a[1])),
    Math.round(a[2] + f * (b[2] - a[2])),
  ];
}

export function mapValue(value: number, vmin: number, vmax: number): Color {
  return colorAt(scalePosition(value, vmin, vmax));
}

/** Distinct line colors for multi-entity plots. */
export const SERIES_COLORS: Color[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
  [127, 127, 127],
];
