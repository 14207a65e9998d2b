/** Minimal deterministic SVG chart primitives (no DOM, no randomness). */

export interface Scale {
  (x: number): number;
  ticks(): number[];
  label(x: number): string;
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const fn = ((x: number) => outLo + ((x - lo) / span) * (outHi - outLo)) as Scale;
  fn.ticks = () => {
    const step = niceStep(span / 5);
    const first = Math.ceil(lo / step) * step;
    const out: number[] = [];
    for (let t = first; t <= hi + 1e-12; t += step) out.push(round12(t));
    return out;
  };
  fn.label = (x) => formatNumber(x);
  return fn;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const fn = ((x: number) => outLo + ((Math.log10(x) - llo) / span) * (outHi - outLo)) as Scale;
  fn.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(llo - 1e-9); e <= Math.floor(lhi + 1e-9); e++) out.push(10 ** e);
    return out;
  };
  fn.label = (x) => {
    const e = Math.round(Math.log10(x));
    return Math.abs(10 ** e - x) / x < 1e-9 ? `1e${e}` : formatNumber(x);
  };
  return fn;
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(raw));
  const r = raw / mag;
  return (r >= 5 ? 10 : r >= 2 ? 5 : r >= 1 ? 2 : 1) * mag;
}

function round12(x: number): number {
  return Number(x.toPrecision(12));
}

export function formatNumber(x: number): string {
  if (x === 0) return "0";
  const ax = Math.abs(x);
  if (ax >= 1e4 || ax < 1e-3) {
    return x
      .toExponential(6)
      .replace(/\.?0+e/, "e")
      .replace("e+", "e");
  }
  return String(round12(x));
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  text(x: number, y: number, content: string, attrs = ""): void {
    this.add(`<text x="${r2(x)}" y="${r2(y)}" font-family="sans-serif" ${attrs}>${escapeXml(content)}</text>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#333", width = 1): void {
    this.add(`<line x1="${r2(x1)}" y1="${r2(y1)}" x2="${r2(x2)}" y2="${r2(y2)}" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  polyline(points: Array<[number, number]>, stroke: string, dashed = false): void {
    const pts = points.map(([x, y]) => `${r2(x)},${r2(y)}`).join(" ");
    const dash = dashed ? ' stroke-dasharray="5,3"' : "";
    this.add(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="1.5"${dash}/>`);
  }

  circle(x: number, y: number, radius: number, fill: string): void {
    this.add(`<circle cx="${r2(x)}" cy="${r2(y)}" r="${radius}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, title?: string): void {
    const tip = title ? `<title>${escapeXml(title)}</title>` : "";
    this.add(`<rect x="${r2(x)}" y="${r2(y)}" width="${r2(w)}" height="${r2(h)}" fill="${fill}">${tip}</rect>`);
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n<rect width="100%" height="100%" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r2(x: number): number {
  return Math.round(x * 100) / 100;
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface PanelFrame {
  x: Scale;
  y: Scale;
}

export interface PanelBox {
  left: number;
  top: number;
  width: number;
  height: number;
}

/** Draw axes with ticks and labels; returns nothing, mutates the svg. */
export function drawAxes(
  svg: Svg,
  box: PanelBox,
  x: Scale,
  y: Scale,
  xLabel: string,
  yLabel: string,
  title = "",
): void {
  const bottom = box.top + box.height;
  const right = box.left + box.width;
  svg.line(box.left, bottom, right, bottom);
  svg.line(box.left, box.top, box.left, bottom);
  for (const t of x.ticks()) {
    const px = x(t);
    if (px < box.left - 0.5 || px > right + 0.5) continue;
    svg.line(px, bottom, px, bottom + 4);
    svg.text(px, bottom + 16, x.label(t), 'font-size="10" text-anchor="middle"');
  }
  for (const t of y.ticks()) {
    const py = y(t);
    if (py < box.top - 0.5 || py > bottom + 0.5) continue;
    svg.line(box.left - 4, py, box.left, py);
    svg.text(box.left - 6, py + 3, y.label(t), 'font-size="10" text-anchor="end"');
  }
  svg.text(box.left + box.width / 2, bottom + 30, xLabel, 'font-size="11" text-anchor="middle"');
  svg.add(
    `<text x="${box.left - 38}" y="${box.top + box.height / 2}" font-family="sans-serif" font-size="11" ` +
    `text-anchor="middle" transform="rotate(-90 ${box.left - 38} ${box.top + box.height / 2})">${yLabel}</text>`,
  );
  if (title) svg.text(box.left + box.width / 2, box.top - 6, title, 'font-size="12" text-anchor="middle" font-weight="bold"');
}

export function drawLegend(svg: Svg, box: PanelBox, entries: Array<[string, string]>): void {
  entries.forEach(([label, color], i) => {
    const y = box.top + 12 + 14 * i;
    svg.line(box.left + box.width - 90, y - 3, box.left + box.width - 72, y - 3, color, 2);
    svg.text(box.left + box.width - 68, y, label, 'font-size="10"');
  });
}

/** Blue-to-red colormap over [0, 1]. */
export function heatColor(t: number): string {
  const c = Math.max(0, Math.min(1, t));
  const r = Math.round(40 + 215 * c);
  const g = Math.round(60 + 60 * (1 - Math.abs(2 * c - 1)));
  const b = Math.round(255 - 215 * c);
  return `rgb(${r},${g},${b})`;
}
