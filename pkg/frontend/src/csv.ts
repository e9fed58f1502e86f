/** Parsers for the simulator's CSV exports. */

import { readFileSync } from "node:fs";

export class CsvSchemaError extends Error {}

export interface EntitySeries {
  entity: string;
  time_s: number[];
  mean_c: number[];
  max_c: number[];
  min_c: number[];
}

const CELL_HEADER = "time_s,entity,mean_c,max_c,min_c";
const SWEEP_HEADER = "pem_voltage_v,c_rate,entity,mean_c,max_c,min_c";

function splitRows(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.trim() !== "")
    .map((line) => line.split(","));
}

/** Per-entity time series from a single-run export. */
export function parseCellCsv(text: string): EntitySeries[] {
  const rows = splitRows(text);
  if (rows.length === 0 || rows[0].join(",") !== CELL_HEADER) {
    throw new CsvSchemaError(`expected header "${CELL_HEADER}"`);
  }
  const byEntity = new Map<string, EntitySeries>();
  for (const row of rows.slice(1)) {
    if (row.length !== 5) throw new CsvSchemaError(`bad row: ${row.join(",")}`);
    const [t, entity, mean, max, min] = row;
    let series = byEntity.get(entity);
    if (!series) {
      series = { entity, time_s: [], mean_c: [], max_c: [], min_c: [] };
      byEntity.set(entity, series);
    }
    series.time_s.push(Number(t));
    series.mean_c.push(Number(mean));
    series.max_c.push(Number(max));
    series.min_c.push(Number(min));
  }
  return [...byEntity.values()];
}

export function readCellCsv(path: string): EntitySeries[] {
  return parseCellCsv(readFileSync(path, "utf-8"));
}

export interface SweepPoint {
  pem_voltage_v: number;
  c_rate: number;
  entity: string;
  mean_c: number;
}

/** Final-time rows of a sweep export (voltage column required). */
export function parseSweepCsv(text: string): SweepPoint[] {
  const rows = splitRows(text);
  if (rows.length === 0 || rows[0].join(",") !== SWEEP_HEADER) {
    throw new CsvSchemaError(`expected header "${SWEEP_HEADER}"`);
  }
  const points: SweepPoint[] = [];
  for (const row of rows.slice(1)) {
    if (row.length !== 6) throw new CsvSchemaError(`bad row: ${row.join(",")}`);
    const [v, c, entity, mean] = row;
    if (v.trim() === "") {
      throw new CsvSchemaError("sweep row is missing the voltage value");
    }
    points.push({
      pem_voltage_v: Number(v),
      c_rate: Number(c),
      entity,
      mean_c: Number(mean),
    });
  }
  return points;
}

export function readSweepCsv(path: string): SweepPoint[] {
  return parseSweepCsv(readFileSync(path, "utf-8"));
}
