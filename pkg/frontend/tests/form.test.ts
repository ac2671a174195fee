import { describe, expect, it } from "vitest";

import {
  DEFAULT_FIELDS,
  FormFields,
  fromScenarioFile,
  parseForm,
  toScenarioFile,
} from "../src/form.js";
import fixture from "./fixtures/dp_row1_service.json";

const DP_ROW1: FormFields = { ...DEFAULT_FIELDS };

describe("parseForm", () => {
  it("builds the exact request the service golden fixture was recorded with", () => {
    const parsed = parseForm(DP_ROW1);
    expect(parsed.valid).toBe(true);
    expect(parsed.compute).toEqual(fixture.requests.dgor);
    expect(parsed.samplesize).toEqual(fixture.requests.samplesize);
    expect({ pmfs: parsed.pmfs }).toEqual(fixture.requests.coords);
  });

  it("blocks submission while any field is invalid", () => {
    const parsed = parseForm({ ...DP_ROW1, nonresp1: "0.5,0.6" });
    expect(parsed.valid).toBe(false);
    expect(parsed.compute).toBeNull();
    expect(parsed.messages.nonresp1).toMatch(/sum/);
  });

  it("flags mismatched category counts across fields", () => {
    const parsed = parseForm({ ...DP_ROW1, nonresp2: "0.5,0.5" });
    expect(parsed.valid).toBe(false);
    expect(parsed.messages.nonresp2).toMatch(/same number of categories/);
  });

  it("shared mode ignores the second responder fields", () => {
    const parsed = parseForm({
      ...DP_ROW1,
      mode: "shared",
      gamma1: "0.2",
      resp1: "0.2,0.3,0.5",
      nonresp1: "0.12,0.32,0.56",
      nonresp2: "0.06,0.41,0.53",
      gamma2: "not even a number",
      resp2: "",
    });
    expect(parsed.valid).toBe(true);
    expect(parsed.compute).toEqual({
      mode: "shared",
      gamma: 0.2,
      resp: [0.2, 0.3, 0.5],
      nonresp1: [0.12, 0.32, 0.56],
      nonresp2: [0.06, 0.41, 0.53],
    });
  });

  it("forwards the loose tolerance for rounded published inputs", () => {
    const parsed = parseForm({
      ...DP_ROW1,
      mode: "shared",
      gamma1: "0.45",
      resp1: "0.10,0.30,0.60",
      nonresp1: "0.41,0.39,0.20",
      nonresp2: "0.46,0.32,0.21",
      roundedInputs: true,
    });
    expect(parsed.valid).toBe(true);
    expect(parsed.compute?.pmf_tol).toBe(0.02);
  });
});

describe("scenario file round-trip", () => {
  it("export then import restores the same fields", () => {
    const parsed = parseForm(DP_ROW1);
    const file = toScenarioFile(DP_ROW1, parsed);
    const restored = fromScenarioFile(file);
    const reparsed = parseForm(restored);
    expect(reparsed.valid).toBe(true);
    expect(reparsed.compute).toEqual(parsed.compute);
    expect(restored.mode).toBe("distinct");
  });

  it("round-trips a shared-path scenario", () => {
    const fields: FormFields = {
      ...DP_ROW1,
      mode: "shared",
      gamma1: "0.3",
      resp1: "0.24,0.35,0.41",
      nonresp1: "0.16,0.32,0.52",
      nonresp2: "0.38,0.35,0.27",
    };
    const file = toScenarioFile(fields, parseForm(fields));
    expect(file.regimes[0].stage1).toBe(file.regimes[1].stage1);
    const reparsed = parseForm(fromScenarioFile(file));
    expect(reparsed.compute).toEqual(parseForm(fields).compute);
  });
});
