/** Service client with latest-wins request cancellation per panel. */
import {
  ComputeRequest,
  ComputeResponse,
  CoordsResponse,
  ProblemDocument,
  SamplesizeResponse,
} from "./types.js";

export class ServiceError extends Error {
  code: string;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

export class UnreachableError extends Error {}

type FetchLike = (url: string, init: RequestInit) => Promise<Response>;

/** Posts JSON to one endpoint; a newer call aborts the one in flight, and an
 * aborted call resolves to null so stale responses never reach the view. */
export class Panel<TResponse> {
  private controller: AbortController | null = null;

  constructor(
    private readonly url: string,
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  async post(body: unknown): Promise<TResponse | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    let response: Response;
    try {
      response = await this.fetchImpl(this.url, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted) {
        return null;
      }
      throw new UnreachableError(String(err));
    }
    if (controller.signal.aborted) {
      return null;
    }
    if (!response.ok) {
      let code = `http.${response.status}`;
      let message = response.statusText;
      try {
        const doc = (await response.json()) as ProblemDocument;
        if (doc && doc.error) {
          code = doc.error.code;
          message = doc.error.message;
        }
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ServiceError(code, message);
    }
    return (await response.json()) as TResponse;
  }
}

export interface Client {
  dgor: Panel<ComputeResponse>;
  samplesize: Panel<SamplesizeResponse>;
  coords: Panel<CoordsResponse>;
}

export function createClient(baseUrl = "", fetchImpl?: FetchLike): Client {
  return {
    dgor: new Panel(`${baseUrl}/api/v1/dgor`, fetchImpl),
    samplesize: new Panel(`${baseUrl}/api/v1/samplesize`, fetchImpl),
    coords: new Panel(`${baseUrl}/api/v1/coords`, fetchImpl),
  };
}

export type { ComputeRequest };
