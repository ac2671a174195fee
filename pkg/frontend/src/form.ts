/** Scenario form state: raw text fields, per-field messages, request building.
 *
 * The form only assembles requests; every displayed statistic comes back from
 * the service.
 */
import {
  ComputeRequest,
  Mode,
  ScenarioFile,
  ScenarioRegime,
} from "./types.js";
import {
  FieldResult,
  ROUNDED_TOL,
  STRICT_TOL,
  parseOpenUnit,
  parsePmf,
  parseRate,
} from "./validate.js";

export interface FormFields {
  mode: Mode;
  gamma1: string;
  gamma2: string;
  resp1: string;
  resp2: string;
  nonresp1: string;
  nonresp2: string;
  alpha: string;
  power: string;
  roundedInputs: boolean;
}

export const DEFAULT_FIELDS: FormFields = {
  mode: "distinct",
  gamma1: "0.3",
  gamma2: "0.4",
  resp1: "0.23,0.51,0.26",
  resp2: "0.31,0.50,0.19",
  nonresp1: "0.50,0.41,0.09",
  nonresp2: "0.14,0.47,0.39",
  alpha: "0.05",
  power: "0.80",
  roundedInputs: false,
};

export interface ParsedForm {
  valid: boolean;
  messages: Partial<Record<keyof FormFields, string>>;
  compute: ComputeRequest | null;
  samplesize: ComputeRequest & { power?: number } | null;
  pmfs: { label: string; probs: number[] }[];
}

/** In shared mode the second responder field is ignored: both regimes share
 * the first responder distribution and rate. */
export function parseForm(fields: FormFields): ParsedForm {
  const tol = fields.roundedInputs ? ROUNDED_TOL : STRICT_TOL;
  const messages: Partial<Record<keyof FormFields, string>> = {};
  const taken = <T>(key: keyof FormFields, result: FieldResult<T>): T | null => {
    if (result.message) {
      messages[key] = result.message;
    }
    return result.value;
  };

  const gamma1 = taken("gamma1", parseRate(fields.gamma1, "response rate"));
  const resp1 = taken("resp1", parsePmf(fields.resp1, tol));
  const nonresp1 = taken("nonresp1", parsePmf(fields.nonresp1, tol));
  const nonresp2 = taken("nonresp2", parsePmf(fields.nonresp2, tol));
  const alpha = taken("alpha", parseOpenUnit(fields.alpha, "alpha"));
  const power = taken("power", parseOpenUnit(fields.power, "power"));

  let gamma2: number | null = null;
  let resp2: number[] | null = null;
  if (fields.mode === "distinct") {
    gamma2 = taken("gamma2", parseRate(fields.gamma2, "response rate"));
    resp2 = taken("resp2", parsePmf(fields.resp2, tol));
  }

  const lengths = [resp1, nonresp1, nonresp2, resp2]
    .filter((p): p is number[] => p !== null)
    .map((p) => p.length);
  if (lengths.length > 1 && new Set(lengths).size > 1) {
    messages.nonresp2 = "all probability lists need the same number of categories";
  }

  const valid = Object.keys(messages).length === 0;
  if (!valid) {
    return { valid, messages, compute: null, samplesize: null, pmfs: [] };
  }

  const base: ComputeRequest =
    fields.mode === "shared"
      ? {
          mode: "shared",
          gamma: gamma1!,
          resp: resp1!,
          nonresp1: nonresp1!,
          nonresp2: nonresp2!,
        }
      : {
          mode: "distinct",
          gamma1: gamma1!,
          resp1: resp1!,
          nonresp1: nonresp1!,
          gamma2: gamma2!,
          resp2: resp2!,
          nonresp2: nonresp2!,
        };
  if (fields.roundedInputs) {
    base.pmf_tol = ROUNDED_TOL;
  }
  const pmfs =
    fields.mode === "shared"
      ? [
          { label: "responders", probs: resp1! },
          { label: "switch arm 1", probs: nonresp1! },
          { label: "switch arm 2", probs: nonresp2! },
        ]
      : [
          { label: "responders 1", probs: resp1! },
          { label: "non-responders 1", probs: nonresp1! },
          { label: "responders 2", probs: resp2! },
          { label: "non-responders 2", probs: nonresp2! },
        ];
  return {
    valid,
    messages,
    compute: base,
    samplesize: { ...base, alpha: alpha!, power: power! },
    pmfs,
  };
}

/** CLI-compatible scenario document for the current form values. */
export function toScenarioFile(fields: FormFields, parsed: ParsedForm): ScenarioFile {
  if (!parsed.valid || !parsed.compute) {
    throw new Error("cannot export an invalid form");
  }
  const c = parsed.compute;
  const shared = fields.mode === "shared";
  const reference: ScenarioRegime = {
    gamma: shared ? c.gamma! : c.gamma1!,
    resp: shared ? c.resp! : c.resp1!,
    nonresp: c.nonresp1!,
    stage1: "A",
    stage2: "E",
  };
  const comparison: ScenarioRegime = {
    gamma: shared ? c.gamma! : c.gamma2!,
    resp: shared ? c.resp! : c.resp2!,
    nonresp: c.nonresp2!,
    stage1: shared ? "A" : "B",
    stage2: shared ? "F" : "E",
  };
  return {
    regimes: [reference, comparison],
    alpha: Number(fields.alpha),
    power: Number(fields.power),
  };
}

/** Restore form fields from a scenario file (the import half of the
 * round-trip contract). */
export function fromScenarioFile(doc: ScenarioFile): FormFields {
  const [reference, comparison] = doc.regimes;
  const shared = reference.stage1 === comparison.stage1;
  const offUnit = (p: number[]) =>
    Math.abs(p.reduce((a, b) => a + b, 0) - 1) > STRICT_TOL;
  const needLooseTol = [reference.resp, reference.nonresp, comparison.resp,
                        comparison.nonresp].some(offUnit);
  return {
    mode: shared ? "shared" : "distinct",
    gamma1: String(reference.gamma),
    gamma2: String(comparison.gamma),
    resp1: reference.resp.join(","),
    resp2: comparison.resp.join(","),
    nonresp1: reference.nonresp.join(","),
    nonresp2: comparison.nonresp.join(","),
    alpha: String(doc.alpha),
    power: String(doc.power),
    roundedInputs: needLooseTol,
  };
}
