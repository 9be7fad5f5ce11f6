/**
 * Figure assembly for the three study types.
 *
 * Variance: simulated Var(T^2) vs n per estimator, with the theoretical
 * chi-squared / F lines overlaid in grey (class "theory-line").
 * Bias: bias vs n, panels per (true effect size, skedasticity), zero line.
 * Coverage: coverage vs n, panels per (true effect size, estimator), the
 * nominal level drawn as a dashed line (class "nominal-line") and 2x MC-SE
 * error bars (class "mc-band") on every point.
 */

import { SchemaError, StudyRow } from "./csv";
import { el, linearScale, text, ticks } from "./svg";

const ESTIMATOR_COLORS: Record<string, string> = {
  oracle: "#1b9e77",
  parametric: "#d95f02",
  robust: "#7570b3",
};
const PALETTE = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d"];

const PANEL_W = 300;
const PANEL_H = 220;
const MARGIN = { top: 34, right: 16, bottom: 42, left: 58 };
const LEGEND_H = 26;

interface Point {
  x: number;
  y: number;
  se: number | null;
}

interface Series {
  label: string;
  color: string;
  cls: string;
  dash?: string;
  points: Point[];
}

interface Panel {
  title: string;
  series: Series[];
  refLines: { y: number; cls: string; color: string }[];
}

function seriesColor(label: string, index: number): string {
  return ESTIMATOR_COLORS[label] ?? PALETTE[index % PALETTE.length];
}

function groupBy<T>(items: T[], key: (item: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const got = out.get(k);
    if (got) {
      got.push(item);
    } else {
      out.set(k, [item]);
    }
  }
  return out;
}

function toPoints(rows: StudyRow[]): Point[] {
  return rows
    .slice()
    .sort((a, b) => a.n - b.n)
    .map((r) => ({ x: r.n, y: r.value, se: r.mcSe }));
}

function renderPanelGrid(
  panels: Panel[],
  opts: { xLabel: string; yLabel: string; yPad?: number },
): string {
  const ncols = Math.min(panels.length, 3);
  const nrows = Math.ceil(panels.length / ncols);
  const width = ncols * PANEL_W;
  const height = nrows * PANEL_H + LEGEND_H;

  const xs: number[] = [];
  const ys: number[] = [];
  for (const p of panels) {
    for (const s of p.series) {
      for (const pt of s.points) {
        xs.push(pt.x);
        ys.push(pt.y - 2 * (pt.se ?? 0), pt.y + 2 * (pt.se ?? 0));
      }
    }
    for (const ref of p.refLines) {
      ys.push(ref.y);
    }
  }
  const pad = opts.yPad ?? 0.05 * (Math.max(...ys) - Math.min(...ys) || 1);
  const xDomain: [number, number] = [Math.min(...xs), Math.max(...xs)];
  const yDomain: [number, number] = [Math.min(...ys) - pad, Math.max(...ys) + pad];

  const parts: string[] = [];
  panels.forEach((panel, idx) => {
    const px = (idx % ncols) * PANEL_W;
    const py = Math.floor(idx / ncols) * PANEL_H;
    const innerW = PANEL_W - MARGIN.left - MARGIN.right;
    const innerH = PANEL_H - MARGIN.top - MARGIN.bottom;
    const sx = linearScale(xDomain, [0, innerW]);
    const sy = linearScale(yDomain, [innerH, 0]);
    const inner: string[] = [];

    inner.push(el("rect", { x: 0, y: 0, width: innerW, height: innerH, fill: "none", stroke: "#999" }));
    for (const tv of ticks(xDomain[0], xDomain[1], 4)) {
      inner.push(el("line", { x1: sx(tv), y1: innerH, x2: sx(tv), y2: innerH + 4, stroke: "#333" }));
      inner.push(text(sx(tv), innerH + 16, String(tv), { "font-size": 10, "text-anchor": "middle" }));
    }
    for (const tv of ticks(yDomain[0], yDomain[1], 4)) {
      inner.push(el("line", { x1: -4, y1: sy(tv), x2: 0, y2: sy(tv), stroke: "#333" }));
      inner.push(
        text(-7, sy(tv) + 3, formatTick(tv), { "font-size": 10, "text-anchor": "end" }),
      );
    }
    for (const ref of panel.refLines) {
      inner.push(
        el("line", {
          x1: 0,
          y1: sy(ref.y),
          x2: innerW,
          y2: sy(ref.y),
          stroke: ref.color,
          "stroke-dasharray": "5,3",
          class: ref.cls,
        }),
      );
    }
    for (const s of panel.series) {
      const path = s.points.map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`).join(" ");
      const attrs: Record<string, string | number> = {
        points: path,
        fill: "none",
        stroke: s.color,
        "stroke-width": 1.6,
        class: s.cls,
      };
      if (s.dash) {
        attrs["stroke-dasharray"] = s.dash;
      }
      inner.push(el("polyline", attrs));
      for (const p of s.points) {
        inner.push(el("circle", { cx: sx(p.x), cy: sy(p.y), r: 2.2, fill: s.color }));
        if (p.se !== null && p.se > 0) {
          inner.push(
            el("line", {
              x1: sx(p.x),
              y1: sy(p.y - 2 * p.se),
              x2: sx(p.x),
              y2: sy(p.y + 2 * p.se),
              stroke: s.color,
              class: "mc-band",
            }),
          );
        }
      }
    }
    inner.push(
      text(innerW / 2, -10, panel.title, { "font-size": 11, "text-anchor": "middle", "font-weight": "bold" }),
    );
    inner.push(text(innerW / 2, innerH + 32, opts.xLabel, { "font-size": 11, "text-anchor": "middle" }));
    inner.push(
      el(
        "g",
        { transform: `translate(${-MARGIN.left + 14},${innerH / 2}) rotate(-90)` },
        [text(0, 0, opts.yLabel, { "font-size": 11, "text-anchor": "middle" })],
      ),
    );
    parts.push(
      el("g", { transform: `translate(${px + MARGIN.left},${py + MARGIN.top})` }, inner),
    );
  });

  // shared legend from the first panel's series
  const legendItems = panels[0].series;
  const legend: string[] = [];
  let lx = MARGIN.left;
  legendItems.forEach((s) => {
    legend.push(
      el("line", {
        x1: lx, y1: height - 12, x2: lx + 22, y2: height - 12,
        stroke: s.color, "stroke-width": 2,
        ...(s.dash ? { "stroke-dasharray": s.dash } : {}),
      }),
    );
    legend.push(text(lx + 27, height - 8, s.label, { "font-size": 11 }));
    lx += 40 + 7 * s.label.length;
  });

  return el(
    "svg",
    { xmlns: "http://www.w3.org/2000/svg", width, height, viewBox: `0 0 ${width} ${height}` },
    [el("rect", { x: 0, y: 0, width, height, fill: "white" }), ...parts, ...legend],
  );
}

function formatTick(v: number): string {
  return Math.abs(v) >= 1000 ? String(v) : String(Math.round(v * 1000) / 1000);
}

function panelKeyTitle(parts: [string, string][]): string {
  return parts.map(([k, v]) => `${k}=${v}`).join(", ");
}

export function renderVariance(rows: StudyRow[]): string {
  const sim = rows.filter((r) => r.study === "variance" && r.statistic === "var_t2");
  if (sim.length === 0) {
    throw new SchemaError("no variance rows (statistic var_t2) in input");
  }
  const theory = rows.filter((r) => r.statistic === "var_theory");
  const panels: Panel[] = [...groupBy(sim, (r) => `${r.skedasticity}|${r.covariateMode}`)].map(
    ([key, panelRows]) => {
      const [sked, mode] = key.split("|");
      const series: Series[] = [...groupBy(panelRows, (r) => r.estimator)].map(([est, g], i) => ({
        label: est,
        color: seriesColor(est, i),
        cls: "sim-line",
        points: toPoints(g),
      }));
      const theorySeries: Series[] = [
        ...groupBy(
          theory.filter((r) => r.skedasticity === sked && r.covariateMode === mode),
          (r) => r.estimator,
        ),
      ].map(([est, g]) => ({
        label: `${est} theory`,
        color: "#9a9a9a",
        cls: "theory-line",
        dash: "6,3",
        points: toPoints(g),
      }));
      return {
        title: panelKeyTitle([["errors", sked], ["covariate", mode]]),
        series: [...theorySeries, ...series],
        refLines: [],
      };
    },
  );
  return renderPanelGrid(panels, { xLabel: "n", yLabel: "Var(T^2)" });
}

export function renderBias(rows: StudyRow[]): string {
  const bias = rows.filter((r) => r.study === "bias" && r.statistic === "bias");
  if (bias.length === 0) {
    throw new SchemaError("no bias rows (statistic bias) in input");
  }
  const panels: Panel[] = [...groupBy(bias, (r) => `${r.sTrue}|${r.skedasticity}`)].map(
    ([key, panelRows]) => {
      const [s, sked] = key.split("|");
      return {
        title: panelKeyTitle([["S", s], ["errors", sked]]),
        series: [...groupBy(panelRows, (r) => r.estimator)].map(([est, g], i) => ({
          label: est,
          color: seriesColor(est, i),
          cls: "sim-line",
          points: toPoints(g),
        })),
        refLines: [{ y: 0, cls: "zero-line", color: "#555" }],
      };
    },
  );
  return renderPanelGrid(panels, { xLabel: "n", yLabel: "bias of S-hat" });
}

export function renderCoverage(rows: StudyRow[], nominal = 0.95): string {
  const cov = rows.filter((r) => r.study === "coverage" && r.statistic === "coverage");
  if (cov.length === 0) {
    throw new SchemaError("no coverage rows (statistic coverage) in input");
  }
  const panels: Panel[] = [...groupBy(cov, (r) => `${r.sTrue}|${r.estimator}`)].map(
    ([key, panelRows]) => {
      const [s, est] = key.split("|");
      return {
        title: panelKeyTitle([["S", s], ["estimator", est]]),
        series: [...groupBy(panelRows, (r) => r.ciMethod)].map(([method, g], i) => ({
          label: method,
          color: PALETTE[(i + 3) % PALETTE.length],
          cls: "sim-line",
          points: toPoints(g),
        })),
        refLines: [{ y: nominal, cls: "nominal-line", color: "#222" }],
      };
    },
  );
  return renderPanelGrid(panels, { xLabel: "n", yLabel: "coverage", yPad: 0.02 });
}

export function render(study: "variance" | "bias" | "coverage", rows: StudyRow[]): string {
  switch (study) {
    case "variance":
      return renderVariance(rows);
    case "bias":
      return renderBias(rows);
    case "coverage":
      return renderCoverage(rows);
  }
}
