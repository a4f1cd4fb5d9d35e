/** Parsed sweep grid with completeness checks. */

import { CsvError, numericColumn, parseCsv, requireColumns, Table } from "./csv.js";

const SWEEP_COLUMNS = [
  "scheme",
  "N",
  "phi1",
  "phi2",
  "inv_var_phi1",
  "inv_var_phi2",
];

function sortedUnique(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

export interface PeakInfo {
  phi1: number;
  phi2: number;
  value: number;
}

export class SweepFrame {
  readonly scheme: string;
  readonly n: number;
  readonly phi1Values: number[];
  readonly phi2Values: number[];
  private readonly invVar1 = new Map<string, number>();
  private readonly invVar2 = new Map<string, number>();

  private constructor(table: Table) {
    requireColumns(table, SWEEP_COLUMNS);
    const schemes = new Set(table.rows.map((r) => r[0]));
    if (schemes.size !== 1) {
      throw new CsvError(`sweep mixes schemes: ${[...schemes].join(", ")}`);
    }
    this.scheme = table.rows[0][0];
    const ns = sortedUnique(numericColumn(table, "N"));
    if (ns.length !== 1) {
      throw new CsvError(`sweep mixes N values: ${ns.join(", ")}`);
    }
    this.n = ns[0];
    const phi1 = numericColumn(table, "phi1");
    const phi2 = numericColumn(table, "phi2");
    const v1 = numericColumn(table, "inv_var_phi1");
    const v2 = numericColumn(table, "inv_var_phi2");
    this.phi1Values = sortedUnique(phi1);
    this.phi2Values = sortedUnique(phi2);
    const expected = this.phi1Values.length * this.phi2Values.length;
    if (table.rows.length !== expected) {
      throw new CsvError(
        `ragged grid: ${table.rows.length} rows but ` +
          `${this.phi1Values.length} x ${this.phi2Values.length} = ${expected} points`,
      );
    }
    for (let k = 0; k < table.rows.length; k++) {
      const key = SweepFrame.key(phi1[k], phi2[k]);
      if (this.invVar1.has(key)) {
        throw new CsvError(`duplicate grid point at (${phi1[k]}, ${phi2[k]})`);
      }
      this.invVar1.set(key, v1[k]);
      this.invVar2.set(key, v2[k]);
    }
  }

  static fromCsv(text: string): SweepFrame {
    return new SweepFrame(parseCsv(text));
  }

  private static key(phi1: number, phi2: number): string {
    return `${phi1}|${phi2}`;
  }

  valueAt(phi1: number, phi2: number): number {
    const v = this.invVar1.get(SweepFrame.key(phi1, phi2));
    if (v === undefined) {
      throw new CsvError(`no grid point at (${phi1}, ${phi2})`);
    }
    return v;
  }

  peakInvVarPhi1(): PeakInfo {
    let best: PeakInfo | null = null;
    for (const p1 of this.phi1Values) {
      for (const p2 of this.phi2Values) {
        const value = this.valueAt(p1, p2);
        if (best === null || value > best.value) {
          best = { phi1: p1, phi2: p2, value };
        }
      }
    }
    return best!;
  }

  nearestPhi2(target: number): number {
    let best = this.phi2Values[0];
    for (const v of this.phi2Values) {
      if (Math.abs(v - target) < Math.abs(best - target)) best = v;
    }
    return best;
  }

  slice(phi2: number): { phi1: number; value: number }[] {
    return this.phi1Values.map((p1) => ({ phi1: p1, value: this.valueAt(p1, phi2) }));
  }
}
