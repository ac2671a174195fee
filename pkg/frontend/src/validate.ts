/** Client-side field validation.
 *
 * Mirrors the service's pmf rules (every entry in [0,1], at least two
 * categories, sum within tolerance of 1) so obviously bad input never
 * produces a request; the service remains the authority for everything else.
 */

export const STRICT_TOL = 1e-9;
export const ROUNDED_TOL = 0.02;

export interface FieldResult<T> {
  value: T | null;
  message: string | null;
}

export function parsePmf(text: string, tol: number = STRICT_TOL): FieldResult<number[]> {
  const trimmed = text.trim();
  if (!trimmed) {
    return { value: null, message: "enter comma-separated probabilities" };
  }
  const parts = trimmed.split(",").map((part) => part.trim());
  const values: number[] = [];
  for (const part of parts) {
    const x = Number(part);
    if (part === "" || !Number.isFinite(x)) {
      return { value: null, message: `'${part}' is not a number` };
    }
    values.push(x);
  }
  if (values.length < 2) {
    return { value: null, message: "need at least 2 categories" };
  }
  for (const x of values) {
    if (x < 0) {
      return { value: null, message: `negative probability ${x}` };
    }
    if (x > 1) {
      return { value: null, message: `probability ${x} exceeds 1` };
    }
  }
  const sum = values.reduce((a, b) => a + b, 0);
  if (Math.abs(sum - 1) > tol) {
    return {
      value: null,
      message: `probabilities sum to ${sum.toPrecision(6)}, not 1`,
    };
  }
  return { value: values, message: null };
}

export function parseRate(text: string, name = "rate"): FieldResult<number> {
  const x = Number(text.trim());
  if (text.trim() === "" || !Number.isFinite(x)) {
    return { value: null, message: `${name} must be a number` };
  }
  if (x < 0 || x > 1) {
    return { value: null, message: `${name} must be in [0, 1]` };
  }
  return { value: x, message: null };
}

export function parseOpenUnit(text: string, name: string): FieldResult<number> {
  const x = Number(text.trim());
  if (text.trim() === "" || !Number.isFinite(x)) {
    return { value: null, message: `${name} must be a number` };
  }
  if (x <= 0 || x >= 1) {
    return { value: null, message: `${name} must be strictly between 0 and 1` };
  }
  return { value: x, message: null };
}
