/** Builders for simulator-format fixture files. */

export function makeDumpText(
  dims: [number, number, number],
  valueAt: (ix: number, iy: number, iz: number) => number,
  spacing = 0.002,
): string {
  const [nx, ny, nz] = dims;
  const lines = [
    "# vtk DataFile Version 3.0",
    "temperature field",
    "ASCII",
    "DATASET STRUCTURED_POINTS",
    `DIMENSIONS ${nx} ${ny} ${nz}`,
    "ORIGIN 0 0 0",
    `SPACING ${spacing} ${spacing} ${spacing}`,
    `POINT_DATA ${nx * ny * nz}`,
    "SCALARS temperature_c float",
    "LOOKUP_TABLE default",
  ];
  for (let iz = 0; iz < nz; iz++) {
    for (let iy = 0; iy < ny; iy++) {
      for (let ix = 0; ix < nx; ix++) {
        lines.push(valueAt(ix, iy, iz).toFixed(6));
      }
    }
  }
  return lines.join("\n") + "\n";
}

export function makeCellCsv(
  entities: string[],
  times: number[],
  meanAt: (entity: string, t: number) => number,
): string {
  const lines = ["time_s,entity,mean_c,max_c,min_c"];
  for (const t of times) {
    for (const e of entities) {
      const m = meanAt(e, t);
      lines.push(
        `${t.toFixed(6)},${e},${m.toFixed(6)},${(m + 0.3).toFixed(6)},${(m - 0.3).toFixed(6)}`);
    }
  }
  return lines.join("\n") + "\n";
}

export function makeSweepCsv(
  rows: { v: number; c: number; entity: string; mean: number }[],
): string {
  const lines = ["pem_voltage_v,c_rate,entity,mean_c,max_c,min_c"];
  for (const r of rows) {
    lines.push(
      `${r.v},${r.c},${r.entity},${r.mean.toFixed(6)},${(r.mean + 0.2).toFixed(6)},${(r.mean - 0.2).toFixed(6)}`);
  }
  return lines.join("\n") + "\n";
}
