/**
 * Log-log variance-vs-N rendering for MC and Fisher CSVs.
 *
 * Data series come straight from CSV cells (per-shot variances for MC
 * output, Cramer-Rao diagonals for Fisher output). The 1/N and 1/N^2
 * guide lines and the 2/(N(N+2)) curve are closed-form overlays and are
 * labeled as references; the fitted slope is annotated.
 */

import { CsvError, numericColumn, parseCsv, Table } from "./csv.js";
import { formatValue, logScale, Svg } from "./svg.js";

export interface Series {
  label: string;
  color: string;
  points: { n: number; y: number }[];
}

export interface ScalingResult {
  svg: string;
  slopePhi1: number | null;
  slopePhi2: number | null;
  warnings: string[];
}

function fitSlope(points: { n: number; y: number }[]): number | null {
  const usable = points.filter((p) => p.y > 0 && Number.isFinite(p.y));
  if (new Set(usable.map((p) => p.n)).size < 2) return null;
  const xs = usable.map((p) => Math.log(p.n));
  const ys = usable.map((p) => Math.log(p.y));
  const mx = xs.reduce((a, b) => a + b, 0) / xs.length;
  const my = ys.reduce((a, b) => a + b, 0) / ys.length;
  let num = 0;
  let den = 0;
  for (let k = 0; k < xs.length; k++) {
    num += (xs[k] - mx) * (ys[k] - my);
    den += (xs[k] - mx) ** 2;
  }
  return den > 0 ? num / den : null;
}

function mcSeries(table: Table): { series: Series[]; scheme: string } {
  const scheme = table.rows[0][0];
  const ns = numericColumn(table, "N");
  const shots = numericColumn(table, "shots");
  const v1 = numericColumn(table, "emp_var_phi1");
  const v2 = numericColumn(table, "emp_var_phi2");
  const per1 = ns.map((n, k) => ({ n, y: v1[k] * shots[k] }));
  const per2 = ns.map((n, k) => ({ n, y: v2[k] * shots[k] }));
  return {
    scheme,
    series: [
      { label: "per-shot var(phi1), empirical", color: "#1b6ca8", points: per1 },
      { label: "per-shot var(phi2), empirical", color: "#c23b22", points: per2 },
    ],
  };
}

function fisherSeries(table: Table): { series: Series[]; scheme: string } {
  const ns = numericColumn(table, "N");
  const c1 = numericColumn(table, "crb11");
  const c2 = numericColumn(table, "crb22");
  return {
    scheme: "fisher",
    series: [
      { label: "CRB var(phi1)", color: "#1b6ca8", points: ns.map((n, k) => ({ n, y: c1[k] })) },
      { label: "CRB var(phi2)", color: "#c23b22", points: ns.map((n, k) => ({ n, y: c2[k] })) },
    ],
  };
}

export function renderScaling(csvText: string): ScalingResult {
  const table = parseCsv(csvText);
  const warnings: string[] = [];
  let scheme: string;
  let series: Series[];
  if (table.columns.includes("emp_var_phi1")) {
    ({ scheme, series } = mcSeries(table));
  } else if (table.columns.includes("crb11")) {
    ({ scheme, series } = fisherSeries(table));
  } else {
    throw new CsvError(
      "unrecognized schema: expected MC columns (emp_var_phi1, ...) or " +
        "Fisher columns (crb11, ...)",
    );
  }

  const allPoints = series.flatMap((s) => s.points).filter((p) => p.y > 0);
  const nUnique = [...new Set(allPoints.map((p) => p.n))].sort((a, b) => a - b);
  if (nUnique.length < 3) {
    warnings.push(
      `insufficient N range: ${nUnique.length} distinct value(s), need >= 3 ` +
        "for a meaningful scaling fit",
    );
  }

  const slopePhi1 = fitSlope(series[0].points);
  const slopePhi2 = series.length > 1 ? fitSlope(series[1].points) : null;

  const width = 720;
  const height = 500;
  const margin = { left: 80, right: 40, top: 70, bottom: 55 };
  const svg = new Svg(width, height);

  const nMin = nUnique[0];
  const nMax = nUnique[nUnique.length - 1];
  const yVals = allPoints.map((p) => p.y);
  const yMin = Math.min(...yVals);
  const yMax = Math.max(...yVals);
  const xs = logScale([nMin, Math.max(nMax, nMin + 1)], [margin.left, width - margin.right]);
  const ys = logScale([yMin / 2, yMax * 2], [height - margin.bottom, margin.top]);

  // axes and decade ticks
  svg.line(margin.left, height - margin.bottom, width - margin.right, height - margin.bottom, "#333");
  svg.line(margin.left, margin.top, margin.left, height - margin.bottom, "#333");
  for (const n of nUnique) {
    svg.line(xs(n), height - margin.bottom, xs(n), height - margin.bottom + 4, "#333");
    svg.text(xs(n), height - margin.bottom + 18, String(n), 11, "middle");
  }
  for (let e = Math.ceil(Math.log10(yMin / 2)); e <= Math.floor(Math.log10(yMax * 2)); e++) {
    const v = Math.pow(10, e);
    svg.line(margin.left - 4, ys(v), margin.left, ys(v), "#333");
    svg.text(margin.left - 8, ys(v) + 4, `1e${e}`, 11, "end");
  }
  svg.text((margin.left + width - margin.right) / 2, height - 12, "N", 13, "middle");
  svg.text(16, margin.top - 14, "variance (log-log)", 12);

  // reference guides anchored at the first data point of the first series
  const anchor = series[0].points.find((p) => p.y > 0);
  if (anchor) {
    const guides: [string, number, string][] = [
      ["~1/N reference", 1, "4 3"],
      ["~1/N^2 reference (Heisenberg)", 2, "7 3"],
    ];
    guides.forEach(([label, power, dash], idx) => {
      const pts: [number, number][] = nUnique.map((n) => [
        xs(n),
        ys(anchor.y * Math.pow(anchor.n / n, power)),
      ]);
      svg.polyline(pts, "#888", 1, dash);
      svg.text(width - margin.right - 6, margin.top + 16 * (idx + 1) + 40,
               label, 11, "end", "#666");
    });
  }
  if (scheme === "dicke") {
    const pts: [number, number][] = nUnique.map((n) => [
      xs(n),
      ys(2 / (n * (n + 2))),
    ]);
    svg.polyline(pts, "#2e8540", 1.2, "2 2");
    svg.text(width - margin.right - 6, margin.top + 88,
             "2/(N(N+2)) reference", 11, "end", "#2e8540");
  }

  series.forEach((s, idx) => {
    const pts = s.points.filter((p) => p.y > 0);
    svg.polyline(pts.map((p) => [xs(p.n), ys(p.y)] as [number, number]), s.color, 1.4);
    for (const p of pts) svg.circle(xs(p.n), ys(p.y), 2.5, s.color);
    svg.text(width - margin.right - 6, margin.top + 16 * (idx + 1) - 8,
             s.label, 11, "end", s.color);
  });

  svg.text(20, 26, `variance scaling vs N (${scheme})`, 15);
  const slopeText =
    `fit slope (phi1) = ${slopePhi1 === null ? "n/a" : formatValue(slopePhi1, 4)}` +
    (slopePhi2 === null ? "" : `, fit slope (phi2) = ${formatValue(slopePhi2, 4)}`);
  svg.text(20, 46, slopeText, 12, "start", "#444");
  warnings.forEach((w, k) => svg.text(20, 64 + 14 * k, `warning: ${w}`, 11, "start", "#b00"));

  return { svg: svg.toString(), slopePhi1, slopePhi2, warnings };
}
