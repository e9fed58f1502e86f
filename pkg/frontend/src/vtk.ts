/** Parser for the simulator's legacy structured-points field dumps. */

import { readFileSync } from "node:fs";

export interface FieldDump {
  dims: [number, number, number];
  origin: [number, number, number];
  spacing: number;
  /** scalar values in x-fastest order, as written */
  values: Float64Array;
}

export class DumpFormatError extends Error {}

export function parseFieldDump(text: string): FieldDump {
  const lines = text.split(/\r?\n/);
  let dims: [number, number, number] | null = null;
  let origin: [number, number, number] = [0, 0, 0];
  let spacing = 1;
  let dataStart = -1;

  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (line.startsWith("DIMENSIONS")) {
      const parts = line.split(/\s+/).slice(1, 4).map(Number);
      if (parts.length !== 3 || parts.some((v) => !Number.isInteger(v) || v < 1)) {
        throw new DumpFormatError(`bad DIMENSIONS line: ${line}`);
      }
      dims = parts as [number, number, number];
    } else if (line.startsWith("ORIGIN")) {
      origin = line.split(/\s+/).slice(1, 4).map(Number) as [number, number, number];
    } else if (line.startsWith("SPACING")) {
      spacing = Number(line.split(/\s+/)[1]);
    } else if (line.startsWith("LOOKUP_TABLE")) {
      dataStart = i + 1;
      break;
    }
  }
  if (dims === null || dataStart < 0) {
    throw new DumpFormatError("not a structured-points dump");
  }
  const n = dims[0] * dims[1] * dims[2];
  const values = new Float64Array(n);
  let k = 0;
  for (let i = dataStart; i < lines.length && k < n; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    for (const tok of line.split(/\s+/)) {
      if (k >= n) break;
      const v = Number(tok);
      if (Number.isNaN(v)) throw new DumpFormatError(`bad scalar value: ${tok}`);
      values[k++] = v;
    }
  }
  if (k !== n) {
    throw new DumpFormatError(`expected ${n} scalars, found ${k}`);
  }
  return { dims, origin, spacing, values };
}

export function readFieldDump(path: string): FieldDump {
  return parseFieldDump(readFileSync(path, "utf-8"));
}

/** Value at grid index (ix, iy, iz); data is stored x-fastest. */
export function valueAt(dump: FieldDump, ix: number, iy: number, iz: number): number {
  const [nx, ny] = dump.dims;
  return dump.values[ix + nx * (iy + ny * iz)];
}

export interface Slice {
  /** row-major: data[row * width + col]; row = second slice axis */
  data: Float64Array;
  width: number;
  height: number;
  /** grid axes spanned by (col, row) */
  colAxis: number;
  rowAxis: number;
}

/** Extract the plane at `index` along `axis` ("x" | "y" | "z"). */
export function extractSlice(dump: FieldDump, axis: "x" | "y" | "z", index: number): Slice {
  const ax = { x: 0, y: 1, z: 2 }[axis];
  const [nx, ny, nz] = dump.dims;
  if (index < 0 || index >= dump.dims[ax]) {
    throw new RangeError(`slice index ${index} out of range for axis ${axis} (size ${dump.dims[ax]})`);
  }
  const axes = [0, 1, 2].filter((a) => a !== ax);
  const [colAxis, rowAxis] = axes;
  const width = dump.dims[colAxis];
  const height = dump.dims[rowAxis];
  const data = new Float64Array(width * height);
  const idx = [0, 0, 0];
  idx[ax] = index;
  for (let row = 0; row < height; row++) {
    idx[rowAxis] = row;
    for (let col = 0; col < width; col++) {
      idx[colAxis] = col;
      data[row * width + col] = valueAt(dump, idx[0], idx[1], idx[2]);
    }
  }
  return { data, width, height, colAxis, rowAxis };
}
