/**
 * From CSV files to a figure: expand the input glob, pull one series per
 * (file, method), bucket series into panels by the grouping key, render,
 * and encode.
 */

import { writeFileSync } from "node:fs";

import {
  CsvTable,
  columnIndex,
  expandGlob,
  groupValue,
  numericColumn,
  readCsv,
  stringColumn,
} from "./csv";
import { encodePng } from "./png";
import { Panel, RenderOptions, Series, renderPanels } from "./render";
import { Raster } from "./raster";

export interface PlotSpec {
  inputGlob: string;
  yColumn: string;
  groupBy: string;
  outPath: string;
  title?: string;
}

export const Y_COLUMNS = ["residual_inf", "residual_2", "error_to_reference"];

function compareLabels(a: string, b: string): number {
  const na = Number(a);
  const nb = Number(b);
  if (!Number.isNaN(na) && !Number.isNaN(nb)) return na - nb;
  return a < b ? -1 : a > b ? 1 : 0;
}

export function buildPanels(tables: CsvTable[], yColumn: string, groupBy: string): Panel[] {
  const buckets = new Map<string, Map<string, Series>>();
  for (const table of tables) {
    columnIndex(table, yColumn); // fail fast, naming the column
    const iters = numericColumn(table, "iter");
    const values = numericColumn(table, yColumn);
    const methods = stringColumn(table, "method");
    for (let i = 0; i < table.rows.length; i++) {
      const group = groupValue(table, table.rows[i], groupBy);
      const label = methods[i];
      const it = iters[i];
      const v = values[i];
      if (it === null) continue;
      let panel = buckets.get(group);
      if (!panel) {
        panel = new Map();
        buckets.set(group, panel);
      }
      let series = panel.get(label);
      if (!series) {
        series = { label, points: [] };
        panel.set(label, series);
      }
      if (v !== null && v > 0) {
        series.points.push([it, v]);
      }
    }
  }
  const groups = [...buckets.keys()].sort(compareLabels);
  return groups.map((group) => ({
    title: `${groupBy}=${group}`,
    series: [...buckets.get(group)!.values()].sort((a, b) =>
      compareLabels(a.label, b.label),
    ),
  }));
}

export function renderSpec(spec: PlotSpec): Raster {
  const files = expandGlob(spec.inputGlob);
  if (files.length === 0) {
    throw new Error(`no CSV files match ${spec.inputGlob}`);
  }
  const tables = files.map(readCsv);
  const panels = buildPanels(tables, spec.yColumn, spec.groupBy);
  const options: RenderOptions = { yLabel: spec.yColumn, title: spec.title };
  return renderPanels(panels, options);
}

export function plotToFile(spec: PlotSpec): { width: number; height: number; panels: number } {
  const files = expandGlob(spec.inputGlob);
  if (files.length === 0) {
    throw new Error(`no CSV files match ${spec.inputGlob}`);
  }
  const tables = files.map(readCsv);
  const panels = buildPanels(tables, spec.yColumn, spec.groupBy);
  const img = renderPanels(panels, { yLabel: spec.yColumn, title: spec.title });
  writeFileSync(spec.outPath, encodePng(img.width, img.height, img.data));
  return { width: img.width, height: img.height, panels: panels.length };
}
