/** SVG rendering of service-computed barycentric points.
 *
 * All coordinates come from /api/v1/coords; this module only maps the unit
 * triangle into pixel space and emits markup.
 */
import { CoordsPoint } from "./types.js";

const SQRT3_2 = Math.sqrt(3) / 2;

export interface TriangleLayout {
  size: number;
  margin: number;
}

export const DEFAULT_LAYOUT: TriangleLayout = { size: 320, margin: 28 };

export function toPixel(
  point: { x: number; y: number },
  layout: TriangleLayout = DEFAULT_LAYOUT,
): { px: number; py: number } {
  const scale = layout.size - 2 * layout.margin;
  return {
    px: layout.margin + point.x * scale,
    // SVG y grows downward; the triangle apex (category 3) points up
    py: layout.size - layout.margin - point.y * scale,
  };
}

const PALETTE = ["#c0392b", "#2e86c1", "#7d6608", "#6c3483", "#1e8449", "#b9770e"];

export function triangleSvg(
  points: CoordsPoint[],
  layout: TriangleLayout = DEFAULT_LAYOUT,
): string {
  const a = toPixel({ x: 0, y: 0 }, layout);
  const b = toPixel({ x: 1, y: 0 }, layout);
  const c = toPixel({ x: 0.5, y: SQRT3_2 }, layout);
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${layout.size} ${layout.size}" role="img" ` +
      `aria-label="barycentric plot of outcome distributions">`,
  );
  parts.push(
    `<polygon points="${a.px},${a.py} ${b.px},${b.py} ${c.px},${c.py}" ` +
      `fill="none" stroke="#555" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${a.px - 6}" y="${a.py + 16}" class="vertex">cat 1</text>`,
    `<text x="${b.px - 18}" y="${b.py + 16}" class="vertex">cat 2</text>`,
    `<text x="${c.px - 18}" y="${c.py - 8}" class="vertex">cat 3</text>`,
  );
  points.forEach((point, i) => {
    const { px, py } = toPixel(point, layout);
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      `<circle cx="${px}" cy="${py}" r="5" fill="${color}" fill-opacity="0.8">` +
        `<title>${escapeXml(point.label)} (${point.x.toFixed(3)}, ` +
        `${point.y.toFixed(3)})</title></circle>`,
    );
    parts.push(
      `<text x="${px + 8}" y="${py + 4}" class="pt" fill="${color}">` +
        `${escapeXml(point.label)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
