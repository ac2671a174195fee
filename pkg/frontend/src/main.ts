/** DOM wiring for the designer: form -> debounced service calls -> panels. */
import { Client, ServiceError, UnreachableError, createClient } from "./api.js";
import { triangleSvg } from "./bary.js";
import { debounce } from "./debounce.js";
import {
  DEFAULT_FIELDS,
  FormFields,
  ParsedForm,
  fromScenarioFile,
  parseForm,
  toScenarioFile,
} from "./form.js";
import { ScenarioStore, boardRows, exportScenario, importScenario } from "./storage.js";
import { ComputeResponse, SamplesizeResponse, SavedScenario } from "./types.js";
import { resultView } from "./view.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
};

const FIELD_IDS: (keyof FormFields)[] = [
  "gamma1", "gamma2", "resp1", "resp2", "nonresp1", "nonresp2", "alpha", "power",
];

function readFields(): FormFields {
  const mode = ($("mode") as HTMLSelectElement).value === "shared" ? "shared" : "distinct";
  const fields: FormFields = { ...DEFAULT_FIELDS, mode };
  for (const key of FIELD_IDS) {
    (fields as unknown as Record<string, string>)[key] =
      ($(key) as HTMLInputElement).value;
  }
  fields.roundedInputs = ($("rounded") as HTMLInputElement).checked;
  return fields;
}

function writeFields(fields: FormFields): void {
  ($("mode") as HTMLSelectElement).value = fields.mode;
  for (const key of FIELD_IDS) {
    ($(key) as HTMLInputElement).value = String(fields[key]);
  }
  ($("rounded") as HTMLInputElement).checked = fields.roundedInputs;
}

function showMessages(parsed: ParsedForm): void {
  for (const key of [...FIELD_IDS, "mode" as const]) {
    const slot = document.getElementById(`${key}-msg`);
    if (slot) {
      slot.textContent = parsed.messages[key] ?? "";
    }
  }
  document.querySelectorAll(".shared-hidden").forEach((el) => {
    (el as HTMLElement).style.display =
      ($("mode") as HTMLSelectElement).value === "shared" ? "none" : "";
  });
}

let lastCompute: ComputeResponse | null = null;
let lastSamplesize: SamplesizeResponse | null = null;
let lastFields: FormFields | null = null;
let lastParsed: ParsedForm | null = null;

function renderResults(): void {
  const view = resultView(lastCompute, lastSamplesize);
  $("out-dgor").textContent = view.dgor;
  $("out-log").textContent = view.logDgor;
  $("out-es").textContent = view.es;
  $("out-n").textContent = view.n;
  $("out-pgt").textContent = view.pGt;
  $("out-plt").textContent = view.pLt;
  $("out-peq").textContent = view.pEq;
  $("notes").innerHTML = view.notes.map((n) => `<li>${n}</li>`).join("");
}

function setBanner(text: string | null): void {
  const banner = $("banner");
  banner.textContent = text ?? "";
  banner.style.display = text ? "block" : "none";
}

async function recompute(client: Client): Promise<void> {
  const fields = readFields();
  const parsed = parseForm(fields);
  lastFields = fields;
  lastParsed = parsed;
  showMessages(parsed);
  $("save").toggleAttribute("disabled", !parsed.valid);
  if (!parsed.valid || !parsed.compute || !parsed.samplesize) {
    return; // no request leaves the browser while any field is invalid
  }
  try {
    const [compute, size, coords] = await Promise.all([
      client.dgor.post(parsed.compute),
      client.samplesize.post(parsed.samplesize),
      client.coords.post({
        pmfs: parsed.pmfs,
        pmf_tol: parsed.compute.pmf_tol ?? undefined,
      }),
    ]);
    if (compute) {
      lastCompute = compute;
    }
    if (size) {
      lastSamplesize = size;
    }
    if (coords) {
      $("triangle").innerHTML = triangleSvg(coords.points);
    }
    setBanner(null);
    renderResults();
  } catch (err) {
    if (err instanceof UnreachableError) {
      setBanner("calculator service unreachable — is `dgor serve` running?");
    } else if (err instanceof ServiceError) {
      setBanner(`service rejected the input (${err.code}): ${err.message}`);
    } else {
      setBanner(String(err));
    }
  }
}

function renderBoard(store: ScenarioStore, order: "asc" | "desc"): void {
  const rows = boardRows(store.list(), order);
  const body = $("board-body");
  if (!rows.length) {
    body.innerHTML =
      `<tr><td colspan="5" class="empty">no saved scenarios yet — fill the ` +
      `form and press Save to start comparing designs</td></tr>`;
    return;
  }
  body.innerHTML = rows
    .map(
      (row) => `
      <tr>
        <td>${row.name}</td>
        <td>${row.results.n}</td>
        <td>${row.results.dgor.toFixed(4)}</td>
        <td>${row.results.es.toFixed(4)}</td>
        <td>
          <button data-export="${row.name}">export</button>
          <button data-load="${row.name}">load</button>
          <button data-remove="${row.name}">remove</button>
        </td>
      </tr>`,
    )
    .join("");
}

export function boot(): void {
  const client = createClient("");
  const store = new ScenarioStore(window.localStorage);
  let order: "asc" | "desc" = "asc";

  const scheduled = debounce(() => void recompute(client), 300);
  for (const key of [...FIELD_IDS, "mode", "rounded"]) {
    $(key).addEventListener("input", scheduled);
    $(key).addEventListener("change", scheduled);
  }

  $("save").addEventListener("click", () => {
    if (!lastFields || !lastParsed?.valid || !lastCompute || !lastSamplesize) {
      return;
    }
    const name = (($("scenario-name") as HTMLInputElement).value || "scenario").trim();
    const entry: SavedScenario = {
      name,
      savedAt: new Date().toISOString(),
      scenario: toScenarioFile(lastFields, lastParsed),
      results: {
        n: lastSamplesize.n,
        dgor: lastCompute.dgor ?? Number.NaN,
        es: lastSamplesize.es,
      },
    };
    store.save(entry);
    renderBoard(store, order);
  });

  $("sort-n").addEventListener("click", () => {
    order = order === "asc" ? "desc" : "asc";
    renderBoard(store, order);
  });

  $("board-body").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const exporting = target.getAttribute("data-export");
    const loading = target.getAttribute("data-load");
    const removing = target.getAttribute("data-remove");
    if (exporting) {
      const row = store.list().find((r) => r.name === exporting);
      if (row) {
        const blob = new Blob([exportScenario(row)], { type: "application/json" });
        const link = document.createElement("a");
        link.href = URL.createObjectURL(blob);
        link.download = `${exporting}.scenario.json`;
        link.click();
        URL.revokeObjectURL(link.href);
      }
    } else if (loading) {
      const row = store.list().find((r) => r.name === loading);
      if (row) {
        writeFields(fromScenarioFile(row.scenario));
        scheduled();
        scheduled.flush();
      }
    } else if (removing) {
      store.remove(removing);
      renderBoard(store, order);
    }
  });

  $("import").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) {
      return;
    }
    try {
      writeFields(fromScenarioFile(importScenario(await file.text())));
      scheduled();
      scheduled.flush();
    } catch (err) {
      setBanner(`could not import scenario: ${err}`);
    }
    input.value = "";
  });

  writeFields(DEFAULT_FIELDS);
  renderBoard(store, order);
  scheduled();
  scheduled.flush();
}

if (typeof document !== "undefined" && document.getElementById("mode")) {
  boot();
}
