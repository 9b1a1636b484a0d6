/** Axis scales: log10 for residuals/errors, linear for iteration counts. */

export interface Ticks {
  values: number[];
  labels: string[];
}

export function log10Ticks(min: number, max: number, maxTicks = 12): Ticks {
  if (!(min > 0) || !(max > 0) || min > max) {
    throw new Error(`log scale needs 0 < min <= max, got [${min}, ${max}]`);
  }
  const lo = Math.floor(Math.log10(min));
  const hi = Math.ceil(Math.log10(max));
  const span = Math.max(1, hi - lo);
  const step = Math.max(1, Math.ceil(span / maxTicks));
  const values: number[] = [];
  const labels: string[] = [];
  for (let e = lo; e <= hi; e += step) {
    values.push(Math.pow(10, e));
    labels.push(`1e${e}`);
  }
  return { values, labels };
}

export function linearTicks(min: number, max: number, maxTicks = 6): Ticks {
  if (min > max) {
    throw new Error(`linear scale needs min <= max, got [${min}, ${max}]`);
  }
  if (min === max) {
    return { values: [min], labels: [formatTick(min)] };
  }
  const rawStep = (max - min) / maxTicks;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((k) => k * mag).find((k) => k >= rawStep) ?? 10 * mag;
  const start = Math.ceil(min / step) * step;
  const values: number[] = [];
  for (let v = start; v <= max + 1e-9 * step; v += step) {
    values.push(v);
  }
  return { values, labels: values.map(formatTick) };
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  if (Number.isInteger(value) && Math.abs(value) < 1e6) return String(value);
  const abs = Math.abs(value);
  if (abs >= 1e-3 && abs < 1e6) {
    return String(Number(value.toPrecision(4)));
  }
  return value.toExponential(1).replace("e+", "e").replace(/e(-?)0*(\d)/, "e$1$2");
}

/** Map a data value to pixel coordinates on [pxLo, pxHi]. */
export function makeMapper(
  dataLo: number,
  dataHi: number,
  pxLo: number,
  pxHi: number,
  logScale: boolean,
): (value: number) => number {
  const lo = logScale ? Math.log10(dataLo) : dataLo;
  const hi = logScale ? Math.log10(dataHi) : dataHi;
  const spread = hi - lo || 1;
  return (value: number) => {
    const t = ((logScale ? Math.log10(value) : value) - lo) / spread;
    return pxLo + t * (pxHi - pxLo);
  };
}
