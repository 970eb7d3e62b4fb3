/**
 * Edge styling shared by the DOT builder and the SVG renderer.
 *
 * The mappings must stay identical to the service side's exporter so a
 * diagram looks the same whether rendered here or from its DOT text:
 * phase maps to the HLS wheel (phase 0 = red, lightness .5, saturation
 * .7) and magnitude maps linearly to line thickness with a 0.5pt floor.
 */

export type Complex = [number, number];

export function magnitude([re, im]: Complex): number {
  return Math.hypot(re, im);
}

export function phaseHueDegrees([re, im]: Complex): number {
  const angle = Math.atan2(im, re);
  const twoPi = 2 * Math.PI;
  return (((angle % twoPi) + twoPi) % twoPi) / twoPi * 360;
}

/** One channel of HLS -> RGB (same convention as CPython's colorsys). */
function hlsChannel(m1: number, m2: number, hue: number): number {
  hue = ((hue % 1) + 1) % 1;
  if (hue < 1 / 6) return m1 + (m2 - m1) * hue * 6;
  if (hue < 1 / 2) return m2;
  if (hue < 2 / 3) return m1 + (m2 - m1) * (2 / 3 - hue) * 6;
  return m1;
}

export function phaseColor(w: Complex): string {
  const h = phaseHueDegrees(w) / 360;
  const l = 0.5;
  const s = 0.7;
  const m2 = l <= 0.5 ? l * (1 + s) : l + s - l * s;
  const m1 = 2 * l - m2;
  const toHex = (v: number) =>
    Math.round(v * 255)
      .toString(16)
      .padStart(2, "0");
  const r = hlsChannel(m1, m2, h + 1 / 3);
  const g = hlsChannel(m1, m2, h);
  const b = hlsChannel(m1, m2, h - 1 / 3);
  return `#${toHex(r)}${toHex(g)}${toHex(b)}`;
}

export function penWidth(w: Complex): number {
  return Math.max(0.5, 3.0 * magnitude(w));
}

function fmt(x: number): string {
  if (Number.isInteger(x) && Math.abs(x) < 1e6) return String(x);
  return Number(x.toPrecision(4)).toString();
}

/** Compact complex literal with four significant digits. */
export function formatWeight([re, im]: Complex): string {
  if (im === 0) return fmt(re);
  if (re === 0) {
    if (im === 1) return "i";
    if (im === -1) return "-i";
    return `${fmt(im)}i`;
  }
  const sign = im > 0 ? "+" : "-";
  const mag = Math.abs(im);
  const imag = mag === 1 ? "i" : `${fmt(mag)}i`;
  return `${fmt(re)}${sign}${imag}`;
}

export function isUnit(w: Complex, tol = 1e-9): boolean {
  return Math.abs(w[0] - 1) <= tol && Math.abs(w[1]) <= tol;
}
