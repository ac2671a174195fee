/** Wire types mirroring the calculator service (snake_case JSON fields). */

export type Mode = "distinct" | "shared";

export interface ComputeRequest {
  mode: Mode;
  pmf_tol?: number;
  // shared mode
  gamma?: number;
  resp?: number[];
  // distinct mode
  gamma1?: number;
  resp1?: number[];
  gamma2?: number;
  resp2?: number[];
  // both modes
  nonresp1?: number[];
  nonresp2?: number[];
  n?: number;
  alpha?: number;
}

export interface ComputeResponse {
  p_gt: number;
  p_lt: number;
  p_eq: number;
  dgor: number | null;
  log_dgor: number | null;
  warnings: string[];
  mode: string;
}

export interface SamplesizeResponse {
  n: number;
  es: number;
  dgor?: number;
  log_dgor?: number;
  sigma_eta?: number;
  sigma_log?: number;
  alpha: number;
  power: number;
}

export interface CoordsPoint {
  label: string;
  x: number;
  y: number;
}

export interface CoordsResponse {
  points: CoordsPoint[];
}

export interface ProblemDocument {
  error: { code: string; message: string };
}

/** One regime entry of the CLI-compatible scenario file. */
export interface ScenarioRegime {
  gamma: number;
  resp: number[];
  nonresp: number[];
  stage1: string;
  stage2: string;
}

/** Scenario file schema shared with `dgor simulate --scenario`. */
export interface ScenarioFile {
  regimes: [ScenarioRegime, ScenarioRegime];
  alpha: number;
  power: number;
  seed?: number;
  replications?: number;
  n?: number;
}

/** A saved what-if row on the comparison board. */
export interface SavedScenario {
  name: string;
  savedAt: string;
  scenario: ScenarioFile;
  results: { n: number; dgor: number; es: number };
}
