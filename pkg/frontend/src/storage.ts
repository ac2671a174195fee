/** Saved what-if scenarios: browser-local persistence and the comparison
 * board model (sortable by total N; export/import of CLI scenario files). */
import { SavedScenario, ScenarioFile } from "./types.js";

const KEY = "dgor.scenarios.v1";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export class ScenarioStore {
  constructor(private readonly backend: StorageLike) {}

  list(): SavedScenario[] {
    const raw = this.backend.getItem(KEY);
    if (!raw) {
      return [];
    }
    try {
      const parsed = JSON.parse(raw) as SavedScenario[];
      return Array.isArray(parsed) ? parsed : [];
    } catch {
      return [];
    }
  }

  save(entry: SavedScenario): SavedScenario[] {
    const rows = this.list().filter((row) => row.name !== entry.name);
    rows.push(entry);
    this.backend.setItem(KEY, JSON.stringify(rows));
    return rows;
  }

  remove(name: string): SavedScenario[] {
    const rows = this.list().filter((row) => row.name !== name);
    this.backend.setItem(KEY, JSON.stringify(rows));
    return rows;
  }
}

export type SortOrder = "asc" | "desc";

/** Rows for the comparison table, sorted by required N. */
export function boardRows(rows: SavedScenario[], order: SortOrder = "asc"): SavedScenario[] {
  const sign = order === "asc" ? 1 : -1;
  return [...rows].sort((a, b) => sign * (a.results.n - b.results.n));
}

/** Lossless export: the saved scenario document itself is the file format. */
export function exportScenario(entry: SavedScenario): string {
  return JSON.stringify(entry.scenario, null, 2);
}

export function importScenario(text: string): ScenarioFile {
  const doc = JSON.parse(text) as ScenarioFile;
  if (!doc || !Array.isArray(doc.regimes) || doc.regimes.length !== 2) {
    throw new Error("scenario file needs exactly two entries under 'regimes'");
  }
  for (const regime of doc.regimes) {
    if (!Array.isArray(regime.resp) || !Array.isArray(regime.nonresp)) {
      throw new Error("each regime needs 'resp' and 'nonresp' probability lists");
    }
    if (typeof regime.gamma !== "number") {
      throw new Error("each regime needs a numeric 'gamma'");
    }
  }
  if (typeof doc.alpha !== "number" || typeof doc.power !== "number") {
    throw new Error("scenario file needs numeric 'alpha' and 'power'");
  }
  return doc;
}
