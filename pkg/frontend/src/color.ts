/** Sequential green scale over accuracy quantiles.
 *
 * Six classes; the top class is reserved for the top 1% so the best
 * architectures always render in the darkest green.  Missing metrics get
 * a neutral placeholder.
 */

export const TOP_CLASS_QUANTILE = 0.99;
export const PLACEHOLDER_COLOR = "#cccccc";

const GREENS = ["#edf8e9", "#c7e9c0", "#a1d99b", "#74c476", "#31a354", "#006d2c"];

export function colorClass(quantile: number | undefined): number | null {
  if (quantile === undefined || Number.isNaN(quantile)) return null;
  if (quantile >= TOP_CLASS_QUANTILE) return GREENS.length - 1;
  const clamped = Math.min(Math.max(quantile, 0), 1);
  return Math.min(Math.floor(clamped * (GREENS.length - 1)), GREENS.length - 2);
}

export function accuracyColor(quantile: number | undefined): string {
  const cls = colorClass(quantile);
  return cls === null ? PLACEHOLDER_COLOR : GREENS[cls];
}

export function darkestGreen(): string {
  return GREENS[GREENS.length - 1];
}

export const SELECTION_BORDER = "#ff8c00";
