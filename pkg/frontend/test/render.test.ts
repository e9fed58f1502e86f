import { describe, expect, it } from "vitest";

import { mapValue, SERIES_COLORS } from "../src/colormap.js";
import { parseCellCsv, parseSweepCsv } from "../src/csv.js";
import { renderSeriesFrame } from "../src/series.js";
import { renderSliceRaster } from "../src/slice.js";
import { renderTvvFrame } from "../src/tvv.js";
import { parseFieldDump } from "../src/vtk.js";
import { makeCellCsv, makeDumpText, makeSweepCsv } from "./helpers.js";

describe("slice rendering", () => {
  it("uniform field renders as a single color", () => {
    const dump = parseFieldDump(makeDumpText([6, 5, 4], () => 25));
    const layout = renderSliceRaster(dump, { axis: "z", index: 2 });
    const colors = new Set<string>();
    for (let py = 0; py < layout.slice.height * layout.scale; py++) {
      for (let px = 0; px < layout.slice.width * layout.scale; px++) {
        colors.add(layout.raster
          .get(layout.plotX + px, layout.plotY + py).join(","));
      }
    }
    expect(colors.size).toBe(1);
    expect([...colors][0]).toBe(mapValue(25, 25, 25).join(","));
  });

  it("argmax pixel maps back to the argmax voxel", () => {
    let seed = 12345;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    const dump = parseFieldDump(
      makeDumpText([9, 7, 5], () => 25 + 10 * rand()));
    const layout = renderSliceRaster(dump, { axis: "z", index: 3 });
    const { slice } = layout;
    let best = 0;
    for (let k = 1; k < slice.data.length; k++) {
      if (slice.data[k] > slice.data[best]) best = k;
    }
    const bestVoxel: [number, number] = [best % slice.width,
      Math.floor(best / slice.width)];
    let bestPixel: [number, number] | null = null;
    let bestValue = -Infinity;
    for (let py = 0; py < slice.height * layout.scale; py++) {
      for (let px = 0; px < slice.width * layout.scale; px++) {
        const vox = layout.voxelAt(layout.plotX + px, layout.plotY + py)!;
        const v = slice.data[vox[1] * slice.width + vox[0]];
        if (v > bestValue) {
          bestValue = v;
          bestPixel = [layout.plotX + px, layout.plotY + py];
        }
      }
    }
    expect(layout.voxelAt(...bestPixel!)).toEqual(bestVoxel);
    // and the rendered color at that pixel is the hottest colormap entry
    const expected = mapValue(bestValue, layout.vmin, layout.vmax);
    expect(layout.raster.get(...bestPixel!)).toEqual(expected);
  });

  it("respects explicit color bounds", () => {
    const dump = parseFieldDump(makeDumpText([5, 5, 3], () => 30));
    const layout = renderSliceRaster(dump,
      { axis: "z", index: 1, vmin: 20, vmax: 40 });
    const c = layout.raster.get(layout.plotX, layout.plotY);
    expect(c).toEqual(mapValue(30, 20, 40));
  });
});

describe("time-series rendering", () => {
  it("draws one curve per entity with distinct colors", () => {
    const text = makeCellCsv(["cell1", "cell2", "cell3"], [0, 30, 60, 90],
      (e, t) => 25 + Number(e.slice(-1)) + t / 200);
    const frame = renderSeriesFrame(parseCellCsv(text));
    for (let i = 0; i < 3; i++) {
      const want = SERIES_COLORS[i].join(",");
      let found = 0;
      for (let y = 0; y < frame.raster.height; y++) {
        for (let x = 0; x < frame.raster.width; x++) {
          if (frame.raster.get(x, y).join(",") === want) found++;
        }
      }
      expect(found).toBeGreaterThan(10);
    }
  });

  it("flat series draw horizontal lines", () => {
    const text = makeCellCsv(["cell1"], [0, 30, 60], () => 25.0);
    const frame = renderSeriesFrame(parseCellCsv(text));
    const want = SERIES_COLORS[0].join(",");
    const ys = new Set<number>();
    for (let y = 0; y < frame.raster.height; y++) {
      for (let x = frame.x0 + 1; x < frame.x0 + Math.floor(frame.w * 0.6); x++) {
        if (frame.raster.get(x, y).join(",") === want) ys.add(y);
      }
    }
    expect(ys.size).toBe(1);
  });

  it("monotone data yields a monotone pixel path", () => {
    const text = makeCellCsv(["a"], [0, 20, 40, 60, 80], (_e, t) => 25 + t / 10);
    const frame = renderSeriesFrame(parseCellCsv(text));
    const want = SERIES_COLORS[0].join(",");
    const minYbyX: number[] = [];
    for (let x = frame.x0 + 1; x < frame.x0 + Math.floor(frame.w * 0.6); x++) {
      let minY = Infinity;
      for (let y = 0; y < frame.raster.height; y++) {
        if (frame.raster.get(x, y).join(",") === want) minY = Math.min(minY, y);
      }
      if (minY < Infinity) minYbyX.push(minY);
    }
    expect(minYbyX.length).toBeGreaterThan(10);
    for (let k = 1; k < minYbyX.length; k++) {
      expect(minYbyX[k]).toBeLessThanOrEqual(minYbyX[k - 1]);
    }
  });

  it("rejects an empty file", () => {
    expect(() => renderSeriesFrame([])).toThrow(/no entities/);
  });
});

describe("temperature vs voltage rendering", () => {
  const sweep = [
    { v: 1.0, c: 0, entity: "pem", mean: 25.6 },
    { v: 0.9, c: 0, entity: "pem", mean: 26.4 },
    { v: 0.8, c: 0, entity: "pem", mean: 27.5 },
    { v: 0.6, c: 0, entity: "pem", mean: 30.6 },
    { v: 0.4, c: 0, entity: "pem", mean: 34.9 },
  ];

  it("places markers at decreasing voltage left to right", () => {
    const frame = renderTvvFrame(parseSweepCsv(makeSweepCsv(sweep)));
    // decreasing-voltage axis: higher voltage lies further left
    expect(frame.px(1.0)).toBeLessThan(frame.px(0.4));
    // temperatures rise as voltage falls, so pixels descend left to right
    expect(frame.py(25.6)).toBeGreaterThan(frame.py(34.9));
  });

  it("renders five markers for five points", () => {
    const frame = renderTvvFrame(parseSweepCsv(makeSweepCsv(sweep)));
    const marker = "214,39,40";
    const xs = new Set<number>();
    for (let x = 0; x < frame.raster.width; x++) {
      for (let y = 0; y < frame.raster.height; y++) {
        if (frame.raster.get(x, y).join(",") === marker) {
          xs.add(x);
          break;
        }
      }
    }
    // five markers of radius 2 span five disjoint x clusters
    const clusters = [...xs].sort((a, b) => a - b)
      .reduce((acc: number[][], x) => {
        const last = acc[acc.length - 1];
        if (last && x - last[last.length - 1] <= 1) last.push(x);
        else acc.push([x]);
        return acc;
      }, []);
    expect(clusters).toHaveLength(5);
  });

  it("single point renders a marker and no line", () => {
    const frame = renderTvvFrame(
      parseSweepCsv(makeSweepCsv([sweep[0]])));
    const line = "31,119,180";
    let lines = 0;
    for (let x = 0; x < frame.raster.width; x++) {
      for (let y = 0; y < frame.raster.height; y++) {
        if (frame.raster.get(x, y).join(",") === line) lines++;
      }
    }
    expect(lines).toBe(0);
  });

  it("rejects duplicate voltages", () => {
    const dup = [...sweep, { v: 0.8, c: 0, entity: "pem", mean: 27.6 }];
    expect(() => renderTvvFrame(parseSweepCsv(makeSweepCsv(dup))))
      .toThrow(/duplicate voltage/);
  });

  it("rejects a missing entity", () => {
    expect(() => renderTvvFrame(parseSweepCsv(makeSweepCsv(sweep)), "cellX"))
      .toThrow(/no rows/);
  });
});
