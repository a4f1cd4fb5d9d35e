import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";

const FIXTURES = join(__dirname, "fixtures");

describe("figkit CLI", () => {
  it("renders fig1 into two SVG files", () => {
    const dir = mkdtempSync(join(tmpdir(), "figkit-"));
    const out = join(dir, "fig1.svg");
    const code = main([
      "render", "fig1",
      "--in", join(FIXTURES, "scan_dicke_n50.csv"),
      "--out", out,
    ]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
    const slices = join(dir, "fig1.slices.svg");
    expect(existsSync(slices)).toBe(true);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
  });

  it("renders scaling with custom slice flag ignored", () => {
    const dir = mkdtempSync(join(tmpdir(), "figkit-"));
    const out = join(dir, "scaling.svg");
    const code = main([
      "render", "scaling",
      "--in", join(FIXTURES, "mc_noon_scaling.csv"),
      "--out", out,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("fit slope");
  });

  it("returns 2 on usage errors and missing files", () => {
    expect(main(["render", "bogus", "--in", "x", "--out", "y"])).toBe(2);
    expect(main(["render", "fig1", "--in", "/nonexistent.csv", "--out", "/tmp/x.svg"]))
      .toBe(2);
    expect(main(["render", "fig1", "--in", join(FIXTURES, "scan_dicke_n50.csv")]))
      .toBe(2);
  });
});
