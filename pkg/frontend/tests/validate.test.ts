import { describe, expect, it } from "vitest";

import { ROUNDED_TOL, parseOpenUnit, parsePmf, parseRate } from "../src/validate.js";

describe("parsePmf", () => {
  it("accepts a clean three-category pmf", () => {
    const result = parsePmf("0.23,0.51,0.26");
    expect(result.message).toBeNull();
    expect(result.value).toEqual([0.23, 0.51, 0.26]);
  });

  it("rejects a pmf summing to 1.1 without sending anything", () => {
    const result = parsePmf("0.5,0.6");
    expect(result.value).toBeNull();
    expect(result.message).toMatch(/sum to 1.1/);
  });

  it("rejects negatives and single categories", () => {
    expect(parsePmf("-0.1,0.6,0.5").message).toMatch(/negative/);
    expect(parsePmf("1.0").message).toMatch(/at least 2/);
  });

  it("rejects non-numeric entries", () => {
    expect(parsePmf("0.2,abc,0.3").message).toMatch(/not a number/);
  });

  it("admits two-decimal published tables under the loose tolerance", () => {
    expect(parsePmf("0.46,0.32,0.21").message).toMatch(/sum/);
    expect(parsePmf("0.46,0.32,0.21", ROUNDED_TOL).message).toBeNull();
  });
});

describe("rates and levels", () => {
  it("bounds response rates to [0,1]", () => {
    expect(parseRate("0.45").value).toBe(0.45);
    expect(parseRate("1.2").message).toMatch(/\[0, 1\]/);
    expect(parseRate("").message).toMatch(/number/);
  });

  it("keeps alpha and power strictly inside (0,1)", () => {
    expect(parseOpenUnit("0.05", "alpha").value).toBe(0.05);
    expect(parseOpenUnit("0", "alpha").message).toMatch(/between 0 and 1/);
    expect(parseOpenUnit("1", "power").message).toMatch(/between 0 and 1/);
  });
});
