/** UI parity with the CLI/service on the first benchmark row.
 *
 * The fixture holds byte-exact responses recorded from the real service (the
 * CLI shares the service's serialization path, so these are also the CLI's
 * numbers). The view must display the service values verbatim.
 */
import { describe, expect, it } from "vitest";

import { Panel } from "../src/api.js";
import { DEFAULT_FIELDS, parseForm } from "../src/form.js";
import { ComputeResponse, SamplesizeResponse } from "../src/types.js";
import { resultView } from "../src/view.js";
import fixture from "./fixtures/dp_row1_service.json";

function fixtureFetch(url: string): Response {
  const key = url.endsWith("dgor") ? "dgor" : url.endsWith("samplesize") ? "samplesize" : "coords";
  return new Response(fixture.responses[key as keyof typeof fixture.responses], {
    status: 200,
    headers: { "content-type": "application/json" },
  });
}

describe("first-row parity with the service/CLI", () => {
  it("renders the service's dgor and N unchanged", async () => {
    const parsed = parseForm(DEFAULT_FIELDS);
    const dgorPanel = new Panel<ComputeResponse>("/api/v1/dgor", async (u) => fixtureFetch(u));
    const sizePanel = new Panel<SamplesizeResponse>("/api/v1/samplesize",
                                                    async (u) => fixtureFetch(u));
    const compute = await dgorPanel.post(parsed.compute);
    const size = await sizePanel.post(parsed.samplesize);
    const view = resultView(compute, size);

    const expectedCompute = JSON.parse(fixture.responses.dgor) as ComputeResponse;
    const expectedSize = JSON.parse(fixture.responses.samplesize) as SamplesizeResponse;
    // the raw response values pass through untouched...
    expect(compute?.dgor).toBe(expectedCompute.dgor);
    expect(size?.n).toBe(expectedSize.n);
    // ...and the display is just their fixed-precision rendering
    expect(view.n).toBe(String(expectedSize.n));
    expect(view.dgor).toBe((expectedCompute.dgor as number).toFixed(4));
    // well within the +-0.01 parity budget for identical inputs
    expect(Math.abs(Number(view.dgor) - (expectedCompute.dgor as number))).toBeLessThan(0.01);
    expect(view.es).toBe(expectedSize.es.toFixed(4));
  });

  it("surfaces infinite ratios as a note instead of a number", () => {
    const view = resultView(
      {
        p_gt: 0.5, p_lt: 0.0, p_eq: 0.5, dgor: null, log_dgor: null,
        warnings: ["degenerate_denominator: ..."], mode: "distinct",
      },
      null,
    );
    expect(view.dgor).toBe("—");
    expect(view.notes.some((n) => n.includes("infinite"))).toBe(true);
  });

  it("notes that a shared-path ratio of 1 does not equalize switch arms", () => {
    const view = resultView(
      {
        p_gt: 0.2896, p_lt: 0.2887, p_eq: 0.4217,
        dgor: 1.0033, log_dgor: 0.00332, warnings: [], mode: "shared",
      },
      null,
    );
    expect(view.notes.some((n) => n.includes("does not imply"))).toBe(true);
  });
});
