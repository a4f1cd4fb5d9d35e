import { describe, expect, it } from "vitest";

import { CsvError, numericColumn, parseCsv } from "../src/csv.js";

const SAMPLE = `# phasetomo v0.1.0 command=scan config_sha256=abc seed=none
scheme,N,phi1,phi2,inv_var_phi1,inv_var_phi2
dicke,4,0.1,0,10,12
dicke,4,0.2,0,8,12
`;

describe("parseCsv", () => {
  it("skips comment lines and reads the header", () => {
    const t = parseCsv(SAMPLE);
    expect(t.columns).toEqual([
      "scheme", "N", "phi1", "phi2", "inv_var_phi1", "inv_var_phi2",
    ]);
    expect(t.rows).toHaveLength(2);
  });

  it("tolerates concatenated runs with repeated headers", () => {
    const t = parseCsv(SAMPLE + SAMPLE);
    expect(t.rows).toHaveLength(4);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(CsvError);
    expect(() => parseCsv("# only a comment\n")).toThrow(/empty CSV/);
    expect(() => parseCsv("a,b,c\n")).toThrow(/no data rows/);
  });

  it("rejects ragged rows with a row diagnostic", () => {
    expect(() => parseCsv("a,b\n1,2\n3\n")).toThrow(/row 2 has 1 cells/);
  });

  it("reads numeric columns and flags junk cells", () => {
    const t = parseCsv(SAMPLE);
    expect(numericColumn(t, "inv_var_phi1")).toEqual([10, 8]);
    expect(() => numericColumn(t, "missing")).toThrow(/missing required column/);
    const bad = parseCsv("n,v\n1,oops\n");
    expect(() => numericColumn(bad, "v")).toThrow(/not numeric/);
  });
});
