import { Row, SchemaError, metricBase, metricIndex } from "./csv.js";
import {
  PALETTE,
  PanelBox,
  Scale,
  Svg,
  drawAxes,
  drawLegend,
  formatNumber,
  heatColor,
  linearScale,
  logScale,
} from "./svg.js";

export type FigureId = "fig2" | "fig3" | "figA1" | "figA2" | "figA3";

const PANEL: PanelBox = { left: 60, top: 30, width: 420, height: 200 };

function panelAt(index: number): PanelBox {
  return { ...PANEL, top: PANEL.top + index * (PANEL.height + 70) };
}

function pageHeight(panels: number): number {
  return panels * (PANEL.height + 70) + 20;
}

function need(rows: Row[], what: string): void {
  if (rows.length === 0) throw new SchemaError(`no rows for ${what}`);
}

function uniq<T>(values: T[]): T[] {
  return [...new Set(values)];
}

const PROVENANCE_STYLE: Record<string, { color: string; dashed: boolean }> = {
  gda: { color: PALETTE[0], dashed: false },
  physical: { color: PALETTE[1], dashed: true },
  ideal: { color: PALETTE[2], dashed: false },
};

/** Two stacked panels: optimal qubit count and best population versus p (log x). */
export function renderFig2(rows: Row[]): string {
  const nOpt = rows.filter((r) => r.metric === "n_opt" && r.p !== null);
  const pMax = rows.filter((r) => r.metric === "P_max" && r.p !== null);
  need(nOpt, "metric n_opt");
  need(pMax, "metric P_max");
  const svg = new Svg(560, pageHeight(2));
  const panels: Array<[Row[], string, number]> = [
    [nOpt, "optimal qubit count", 0],
    [pMax, "best final ground population", 1],
  ];
  for (const [data, label, idx] of panels) {
    const box = panelAt(idx);
    const ps = data.map((r) => r.p as number);
    const x = logScale(Math.min(...ps), Math.max(...ps), box.left, box.left + box.width);
    const vals = data.map((r) => r.value);
    const pad = (Math.max(...vals) - Math.min(...vals)) * 0.1 || 0.5;
    const y = linearScale(
      Math.min(...vals) - pad,
      Math.max(...vals) + pad,
      box.top + box.height,
      box.top,
    );
    drawAxes(svg, box, x, y, "CX error probability p", label, idx === 0 ? "optimal performance vs error rate" : "");
    const provenances = uniq(data.map((r) => r.provenance)).sort();
    for (const prov of provenances) {
      const style = PROVENANCE_STYLE[prov] ?? { color: PALETTE[3], dashed: false };
      const series = data
        .filter((r) => r.provenance === prov)
        .sort((a, b) => (a.p as number) - (b.p as number));
      svg.polyline(series.map((r) => [x(r.p as number), y(r.value)]), style.color, style.dashed);
      for (const r of series) svg.circle(x(r.p as number), y(r.value), 3, style.color);
    }
    drawLegend(svg, box, provenances.map((p) => [p, (PROVENANCE_STYLE[p] ?? { color: PALETTE[3] }).color]));
  }
  return svg.render();
}

/** Heatmap of the simulated effective temperature plus a relative-error panel. */
export function renderFig3(rows: Row[]): string {
  const temp = rows.filter((r) => r.metric === "T_eff_mK" && r.provenance === "physical" && r.p !== null);
  const err = rows.filter((r) => r.metric === "T_rel_err" && r.p !== null);
  need(temp, "physical T_eff_mK");
  need(err, "T_rel_err");
  const svg = new Svg(560, pageHeight(2));
  const panels: Array<[Row[], string, (v: number) => string, number]> = [
    [temp, "simulated effective temperature (mK)", formatNumber, 0],
    [err, "relative model error (%)", (v) => formatNumber(100 * v), 1],
  ];
  for (const [data, title, fmt, idx] of panels) {
    const box = panelAt(idx);
    const ns = uniq(data.map((r) => r.n as number)).sort((a, b) => a - b);
    const ps = uniq(data.map((r) => r.p as number)).sort((a, b) => a - b);
    const lo = Math.min(...data.map((r) => r.value));
    const hi = Math.max(...data.map((r) => r.value));
    const cellW = box.width / ns.length;
    const cellH = box.height / ps.length;
    for (const r of data) {
      const xi = ns.indexOf(r.n as number);
      const yi = ps.indexOf(r.p as number);
      const t = hi > lo ? (r.value - lo) / (hi - lo) : 0.5;
      svg.rect(
        box.left + xi * cellW,
        box.top + box.height - (yi + 1) * cellH,
        cellW,
        cellH,
        heatColor(t),
        `n=${r.n}, p=${r.p}: ${fmt(r.value)}`,
      );
      svg.text(
        box.left + (xi + 0.5) * cellW,
        box.top + box.height - (yi + 0.5) * cellH + 3,
        fmt(r.value),
        'font-size="9" text-anchor="middle" fill="white"',
      );
    }
    // axes: qubit count linear, error probability logarithmic
    const x = linearScale(0, ns.length, box.left, box.left + box.width);
    x.ticks = () => ns.map((_, i) => i + 0.5);
    x.label = (v) => String(ns[Math.floor(v)]);
    const y = logScale(ps[0], ps[ps.length - 1], box.top + box.height - cellH / 2, box.top + cellH / 2);
    drawAxes(svg, box, x, y, "qubit count n", "CX error probability p", title);
  }
  return svg.render();
}

/** Ground-state population versus cooling round, one panel per (n, p) case. */
export function renderFigA1(rows: Row[]): string {
  const dyn = rows.filter((r) => metricBase(r.metric) === "population" && metricIndex(r.metric) !== null);
  need(dyn, "population[round] metrics");
  const cases = uniq(dyn.map((r) => `${r.n}|${r.p}`)).sort();
  const svg = new Svg(560, pageHeight(cases.length));
  cases.forEach((key, idx) => {
    const [nStr, pStr] = key.split("|");
    const data = dyn.filter((r) => `${r.n}|${r.p}` === key);
    const box = panelAt(idx);
    const rounds = data.map((r) => metricIndex(r.metric) as number);
    const x = linearScale(0, Math.max(...rounds), box.left, box.left + box.width);
    const vals = data.map((r) => r.value);
    const pad = (Math.max(...vals) - Math.min(...vals)) * 0.08 || 0.01;
    const y = linearScale(Math.min(...vals) - pad, Math.max(...vals) + pad, box.top + box.height, box.top);
    drawAxes(svg, box, x, y, "cooling round", "ground population", `n=${nStr}, p=${pStr}`);
    const provenances = uniq(data.map((r) => r.provenance)).sort();
    for (const prov of provenances) {
      const style = PROVENANCE_STYLE[prov] ?? { color: PALETTE[3], dashed: false };
      const series = data
        .filter((r) => r.provenance === prov)
        .sort((a, b) => (metricIndex(a.metric) as number) - (metricIndex(b.metric) as number));
      svg.polyline(
        series.map((r) => [x(metricIndex(r.metric) as number), y(r.value)]),
        style.color,
        style.dashed,
      );
    }
    drawLegend(svg, box, provenances.map((p) => [p, (PROVENANCE_STYLE[p] ?? { color: PALETTE[3] }).color]));
  });
  return svg.render();
}

/** Twirling-quality fidelity versus composition depth. */
export function renderFigA2(rows: Row[]): string {
  const fid = rows.filter((r) => metricBase(r.metric) === "fidelity" && metricIndex(r.metric) !== null);
  need(fid, "fidelity[R] metrics");
  const svg = new Svg(560, pageHeight(1));
  const box = panelAt(0);
  const series = fid
    .slice()
    .sort((a, b) => (metricIndex(a.metric) as number) - (metricIndex(b.metric) as number));
  const reps = series.map((r) => metricIndex(r.metric) as number);
  const x = linearScale(Math.min(...reps), Math.max(...reps), box.left, box.left + box.width);
  x.ticks = () => reps;
  const vals = series.map((r) => r.value);
  const pad = (Math.max(...vals) - Math.min(...vals)) * 0.1 || 0.01;
  const y = linearScale(Math.min(...vals) - pad, Math.max(...vals) + pad, box.top + box.height, box.top);
  drawAxes(svg, box, x, y, "compression-circuit repetitions R", "mean channel fidelity", "averaging-quality validation");
  svg.polyline(series.map((r) => [x(metricIndex(r.metric) as number), y(r.value)]), PALETTE[0]);
  for (const r of series) svg.circle(x(metricIndex(r.metric) as number), y(r.value), 3.5, PALETTE[0]);
  return svg.render();
}

/** Steady-state population versus qubit count, one curve per error rate. */
export function renderFigA3(rows: Row[]): string {
  const pops = rows.filter((r) => r.metric === "P_n" && r.n !== null);
  need(pops, "metric P_n");
  const withP = pops.filter((r) => r.p !== null);
  need(withP, "noisy P_n rows");
  const svg = new Svg(560, pageHeight(1));
  const box = panelAt(0);
  const ns = uniq(pops.map((r) => r.n as number)).sort((a, b) => a - b);
  const x = linearScale(Math.min(...ns), Math.max(...ns), box.left, box.left + box.width);
  x.ticks = () => ns;
  const vals = pops.map((r) => r.value);
  const pad = (Math.max(...vals) - Math.min(...vals)) * 0.08 || 0.01;
  const y = linearScale(Math.min(...vals) - pad, Math.max(...vals) + pad, box.top + box.height, box.top);
  drawAxes(svg, box, x, y, "total qubit count n", "steady-state ground population", "cooling performance under noise");
  const legend: Array<[string, string]> = [];
  const pValues = uniq(withP.map((r) => r.p as number)).sort((a, b) => a - b);
  pValues.forEach((p, pi) => {
    const color = PALETTE[pi % PALETTE.length];
    for (const prov of ["gda", "physical"]) {
      const series = withP
        .filter((r) => r.p === p && r.provenance === prov)
        .sort((a, b) => (a.n as number) - (b.n as number));
      if (series.length === 0) continue;
      svg.polyline(series.map((r) => [x(r.n as number), y(r.value)]), color, prov === "physical");
      for (const r of series) svg.circle(x(r.n as number), y(r.value), 2.5, color);
    }
    legend.push([`p=${formatNumber(p)}`, color]);
  });
  const ideal = pops
    .filter((r) => r.provenance === "ideal")
    .sort((a, b) => (a.n as number) - (b.n as number));
  if (ideal.length > 0) {
    svg.polyline(ideal.map((r) => [x(r.n as number), y(r.value)]), "#888");
    legend.push(["ideal", "#888"]);
  }
  drawLegend(svg, box, legend);
  return svg.render();
}

const RENDERERS: Record<FigureId, (rows: Row[]) => string> = {
  fig2: renderFig2,
  fig3: renderFig3,
  figA1: renderFigA1,
  figA2: renderFigA2,
  figA3: renderFigA3,
};

export function renderFigure(figure: FigureId, rows: Row[]): string {
  const renderer = RENDERERS[figure];
  if (!renderer) throw new SchemaError(`unknown figure ${figure}`);
  return renderer(rows);
}

export const FIGURE_IDS = Object.keys(RENDERERS) as FigureId[];
