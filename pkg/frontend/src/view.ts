/** Pure render helpers: service responses in, display strings out.
 *
 * Every number shown is taken verbatim from a service response; the only
 * local arithmetic is formatting.
 */
import { ComputeResponse, SamplesizeResponse } from "./types.js";

export function formatNumber(x: number | null | undefined, digits = 4): string {
  if (x === null || x === undefined) {
    return "—";
  }
  return x.toFixed(digits);
}

export interface ResultView {
  dgor: string;
  logDgor: string;
  pGt: string;
  pLt: string;
  pEq: string;
  es: string;
  n: string;
  notes: string[];
}

export function resultView(
  compute: ComputeResponse | null,
  samplesize: SamplesizeResponse | null,
): ResultView {
  const notes: string[] = [];
  if (compute) {
    for (const warning of compute.warnings) {
      notes.push(warning);
    }
    if (compute.dgor === null) {
      notes.push("the odds ratio is infinite here: no mass on the 'worse' side");
    }
    if (compute.mode === "shared" && compute.dgor !== null
        && Math.abs(compute.dgor - 1) < 0.005) {
      notes.push(
        "a shared-path odds ratio of 1 does not imply the two switch arms " +
        "have equal outcome distributions");
    }
  }
  return {
    dgor: formatNumber(compute?.dgor ?? null),
    logDgor: formatNumber(compute?.log_dgor ?? null),
    pGt: formatNumber(compute?.p_gt ?? null),
    pLt: formatNumber(compute?.p_lt ?? null),
    pEq: formatNumber(compute?.p_eq ?? null),
    es: formatNumber(samplesize?.es ?? null),
    n: samplesize ? String(samplesize.n) : "—",
    notes,
  };
}
