/**
 * Surface + slice renderings of a sweep CSV.
 *
 * The surface is an isometric wireframe of inv_var_phi1 over the
 * (phi1, phi2) grid; the slice figure plots inv_var_phi1 against phi1 at a
 * fixed set of phi2 values (snapped to the nearest grid line). Every number
 * shown is taken from the CSV; nothing is recomputed.
 */

import { SweepFrame } from "./frame.js";
import { formatValue, linearScale, niceTicks, Svg } from "./svg.js";

export const DEFAULT_SLICE_PHI2 = [0, 0.05, 0.1, 0.2];

const SLICE_COLORS = ["#1b6ca8", "#c23b22", "#2e8540", "#8031a7", "#b8860b"];

export interface Fig1Result {
  surfaceSvg: string;
  slicesSvg: string;
  peakLabel: string;
}

export function renderFig1(
  csvText: string,
  sliceTargets: number[] = DEFAULT_SLICE_PHI2,
): Fig1Result {
  const frame = SweepFrame.fromCsv(csvText);
  const peak = frame.peakInvVarPhi1();
  const peakLabel =
    `peak 1/(d phi1)^2 = ${formatValue(peak.value)} at ` +
    `(${formatValue(peak.phi1)}, ${formatValue(peak.phi2)})`;
  return {
    surfaceSvg: renderSurface(frame, peakLabel),
    slicesSvg: renderSlices(frame, sliceTargets, peakLabel),
    peakLabel,
  };
}

function renderSurface(frame: SweepFrame, peakLabel: string): string {
  const width = 760;
  const height = 560;
  const svg = new Svg(width, height);
  const n1 = frame.phi1Values.length;
  const n2 = frame.phi2Values.length;
  const peak = frame.peakInvVarPhi1();

  // isometric projection: grid indices to screen
  const ux = width / (n1 + n2 + 6);
  const uy = ux * 0.5;
  const zh = 260 / Math.max(peak.value, 1e-300);
  const x0 = width / 2;
  const y0 = height - 150;

  const project = (i: number, j: number, z: number): [number, number] => [
    x0 + (i - j) * ux,
    y0 - (i + j) * uy - z * zh,
  ];

  for (let i = 0; i < n1; i++) {
    const pts: [number, number][] = [];
    for (let j = 0; j < n2; j++) {
      pts.push(project(i, j, frame.valueAt(frame.phi1Values[i], frame.phi2Values[j])));
    }
    svg.polyline(pts, "#1b6ca8", 0.8);
  }
  for (let j = 0; j < n2; j++) {
    const pts: [number, number][] = [];
    for (let i = 0; i < n1; i++) {
      pts.push(project(i, j, frame.valueAt(frame.phi1Values[i], frame.phi2Values[j])));
    }
    svg.polyline(pts, "#74a9cf", 0.8);
  }

  // base-plane axes
  const corner = project(0, 0, 0);
  const endI = project(n1 - 1, 0, 0);
  const endJ = project(0, n2 - 1, 0);
  svg.line(corner[0], corner[1], endI[0], endI[1], "#555", 1);
  svg.line(corner[0], corner[1], endJ[0], endJ[1], "#555", 1);
  svg.text(endI[0] + 8, endI[1] + 14, `Re phi (${formatValue(frame.phi1Values[0])} .. ${formatValue(frame.phi1Values[n1 - 1])})`, 12);
  svg.text(endJ[0] - 8, endJ[1] + 14, `Im phi (${formatValue(frame.phi2Values[0])} .. ${formatValue(frame.phi2Values[n2 - 1])})`, 12, "end");

  const peakPt = project(
    frame.phi1Values.indexOf(peak.phi1),
    frame.phi2Values.indexOf(peak.phi2),
    peak.value,
  );
  svg.circle(peakPt[0], peakPt[1], 3, "#c23b22");
  svg.text(peakPt[0] + 8, peakPt[1] - 6, formatValue(peak.value), 13, "start", "#c23b22");

  svg.text(20, 28, `inverse variance of Re phi, ${frame.scheme} scheme, N = ${frame.n}`, 15);
  svg.text(20, 48, peakLabel, 12, "start", "#444");
  return svg.toString();
}

function renderSlices(
  frame: SweepFrame,
  sliceTargets: number[],
  peakLabel: string,
): string {
  const width = 720;
  const height = 480;
  const margin = { left: 70, right: 30, top: 60, bottom: 50 };
  const svg = new Svg(width, height);

  const snapped: number[] = [];
  for (const t of sliceTargets) {
    const v = frame.nearestPhi2(t);
    if (!snapped.includes(v)) snapped.push(v);
  }

  const peak = frame.peakInvVarPhi1();
  const xdom: [number, number] = [frame.phi1Values[0], frame.phi1Values[frame.phi1Values.length - 1]];
  const xs = linearScale(xdom, [margin.left, width - margin.right]);
  const ys = linearScale([0, peak.value * 1.05], [height - margin.bottom, margin.top]);

  for (const tx of niceTicks(xdom[0], xdom[1], 6)) {
    svg.line(xs(tx), height - margin.bottom, xs(tx), height - margin.bottom + 4, "#333");
    svg.text(xs(tx), height - margin.bottom + 18, formatValue(tx), 11, "middle");
  }
  for (const ty of niceTicks(0, peak.value * 1.05, 5)) {
    svg.line(margin.left - 4, ys(ty), margin.left, ys(ty), "#333");
    svg.text(margin.left - 8, ys(ty) + 4, formatValue(ty), 11, "end");
  }
  svg.line(margin.left, height - margin.bottom, width - margin.right, height - margin.bottom, "#333");
  svg.line(margin.left, margin.top, margin.left, height - margin.bottom, "#333");
  svg.text((margin.left + width - margin.right) / 2, height - 12, "Re phi", 13, "middle");
  svg.text(18, margin.top - 10, "1/(d phi1)^2", 12);

  snapped.forEach((phi2, idx) => {
    const color = SLICE_COLORS[idx % SLICE_COLORS.length];
    const pts: [number, number][] = frame
      .slice(phi2)
      .map(({ phi1, value }) => [xs(phi1), ys(value)] as [number, number]);
    svg.polyline(pts, color, 1.6);
    svg.text(width - margin.right - 8, margin.top + 18 * (idx + 1),
             `Im phi = ${formatValue(phi2)}`, 12, "end", color);
  });

  svg.text(20, 28, `slices at fixed Im phi, ${frame.scheme} scheme, N = ${frame.n}`, 15);
  svg.text(20, 46, peakLabel, 12, "start", "#444");
  return svg.toString();
}
