/** Tiny deterministic SVG assembly: no randomness, fixed styling. */

export const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

export function formatValue(x: number, digits = 6): string {
  if (!Number.isFinite(x)) return String(x);
  return String(parseFloat(x.toPrecision(digits)));
}

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
        `height="${height}" viewBox="0 0 ${width} ${height}">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#333", widthPx = 1): void {
    this.parts.push(
      `<line x1="${r2(x1)}" y1="${r2(y1)}" x2="${r2(x2)}" y2="${r2(y2)}" ` +
        `stroke="${stroke}" stroke-width="${widthPx}"/>`,
    );
  }

  polyline(points: [number, number][], stroke: string, widthPx = 1.5, dash = ""): void {
    const attr = dash ? ` stroke-dasharray="${dash}"` : "";
    const pts = points.map(([x, y]) => `${r2(x)},${r2(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${widthPx}"${attr}/>`,
    );
  }

  circle(x: number, y: number, radius: number, fill: string): void {
    this.parts.push(
      `<circle cx="${r2(x)}" cy="${r2(y)}" r="${radius}" fill="${fill}"/>`,
    );
  }

  text(x: number, y: number, content: string, size = 12, anchor = "start", fill = "#111"): void {
    this.parts.push(
      `<text x="${r2(x)}" y="${r2(y)}" font-size="${size}" ${FONT} ` +
        `text-anchor="${anchor}" fill="${fill}">${escapeXml(content)}</text>`,
    );
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function r2(x: number): string {
  return (Math.round(x * 100) / 100).toString();
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export interface Scale {
  (x: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const l0 = Math.log(d0);
  const l1 = Math.log(d1);
  const [r0, r1] = range;
  const span = l1 - l0 || 1;
  const fn = ((x: number) => r0 + ((Math.log(x) - l0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function niceTicks(min: number, max: number, count = 5): number[] {
  if (!(max > min)) return [min];
  const rawStep = (max - min) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => (max - min) / s <= count) ?? candidates[4];
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + 1e-12; v += step) {
    ticks.push(parseFloat(v.toPrecision(12)));
  }
  return ticks;
}
