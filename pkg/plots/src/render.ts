/**
 * Multi-panel convergence chart: one panel per group value, log-scale y,
 * one polyline per series (method). Rows from non-converged runs are drawn
 * like any others; a curve that stops early is exactly the information the
 * figure is meant to convey.
 */

import { Raster, Color } from "./raster";
import { linearTicks, log10Ticks, makeMapper } from "./scale";
import { textWidth } from "./font";

export interface Series {
  label: string;
  /** (iteration, value) points; callers have already dropped blank cells. */
  points: Array<[number, number]>;
}

export interface Panel {
  title: string;
  series: Series[];
}

export interface RenderOptions {
  yLabel: string;
  title?: string;
  panelWidth?: number;
  panelHeight?: number;
}

export const PALETTE: Color[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
];

const BLACK: Color = [0, 0, 0];
const GREY: Color = [200, 200, 200];

const MARGIN_LEFT = 62;
const MARGIN_RIGHT = 14;
const MARGIN_TOP = 34;
const MARGIN_BOTTOM = 36;

export function renderPanels(panels: Panel[], opts: RenderOptions): Raster {
  if (panels.length === 0) {
    throw new Error("nothing to render: no panels");
  }
  const pw = opts.panelWidth ?? 340;
  const ph = opts.panelHeight ?? 260;
  const width = panels.length * pw;
  const height = ph + (opts.title ? 16 : 0);
  const img = new Raster(width, height);
  const topOffset = opts.title ? 16 : 0;

  if (opts.title) {
    img.drawTextCentered(width / 2, 4, opts.title, BLACK);
  }

  // shared y-range so panels are comparable
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const panel of panels) {
    for (const s of panel.series) {
      for (const [, v] of s.points) {
        if (v > 0) {
          yMin = Math.min(yMin, v);
          yMax = Math.max(yMax, v);
        }
      }
    }
  }
  if (!Number.isFinite(yMin)) {
    throw new Error("nothing to render: no positive values for the log axis");
  }
  if (yMin === yMax) {
    yMin /= 10;
    yMax *= 10;
  }

  panels.forEach((panel, idx) => {
    drawPanel(img, panel, idx * pw, topOffset, pw, ph, yMin, yMax, opts.yLabel);
  });
  return img;
}

function drawPanel(
  img: Raster,
  panel: Panel,
  x0: number,
  y0: number,
  pw: number,
  ph: number,
  yMin: number,
  yMax: number,
  yLabel: string,
): void {
  const left = x0 + MARGIN_LEFT;
  const right = x0 + pw - MARGIN_RIGHT;
  const top = y0 + MARGIN_TOP;
  const bottom = y0 + ph - MARGIN_BOTTOM;

  let xMax = 1;
  for (const s of panel.series) {
    for (const [it] of s.points) {
      xMax = Math.max(xMax, it);
    }
  }

  const mapX = makeMapper(0, xMax, left, right, false);
  const mapY = makeMapper(yMin, yMax, bottom, top, true);

  // gridlines and ticks
  const yTicks = log10Ticks(yMin, yMax);
  for (let i = 0; i < yTicks.values.length; i++) {
    const y = Math.round(mapY(yTicks.values[i]));
    if (y < top || y > bottom) continue;
    img.drawLine(left, y, right, y, GREY);
    const label = yTicks.labels[i];
    img.drawText(left - textWidth(label) - 5, y - 3, label, BLACK);
  }
  const xTicks = linearTicks(0, xMax);
  for (let i = 0; i < xTicks.values.length; i++) {
    const x = Math.round(mapX(xTicks.values[i]));
    img.drawLine(x, bottom, x, bottom + 3, BLACK);
    img.drawTextCentered(x, bottom + 6, xTicks.labels[i], BLACK);
  }

  // frame
  img.drawLine(left, top, left, bottom, BLACK);
  img.drawLine(left, bottom, right, bottom, BLACK);

  // series
  panel.series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length];
    const pts = s.points
      .filter(([, v]) => v > 0)
      .map(([it, v]) => [mapX(it), mapY(v)] as [number, number]);
    for (let i = 1; i < pts.length; i++) {
      img.drawLine(pts[i - 1][0], pts[i - 1][1], pts[i][0], pts[i][1], color, 2);
    }
    for (const [x, y] of pts) {
      img.fillRect(x - 1, y - 1, 3, 3, color);
    }
  });

  // legend: method names, top-left inside the frame
  panel.series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length];
    const ly = top + 4 + si * 11;
    img.fillRect(left + 6, ly + 2, 10, 3, color);
    img.drawText(left + 20, ly, s.label, BLACK);
  });

  img.drawTextCentered((left + right) / 2, y0 + 4, panel.title, BLACK);
  img.drawTextCentered((left + right) / 2, y0 + ph - 14, "iteration", BLACK);
  img.drawText(x0 + 4, y0 + 14, yLabel, BLACK);
}
