/** Display formatting. Values arrive from the service and are only
 * formatted here, never recomputed. */

export function formatLambda(value: number): string {
  return value.toFixed(7);
}

export function formatMoney(value: number): string {
  const rounded = Math.round(value);
  const sign = rounded < 0 ? "-" : "";
  const digits = Math.abs(rounded).toString();
  let out = "";
  for (let i = 0; i < digits.length; i++) {
    const fromEnd = digits.length - i;
    out += digits[i];
    if (fromEnd > 1 && fromEnd % 3 === 1) out += ",";
  }
  return sign + out;
}

/** Compact rendering for times and quality numbers: integers stay bare,
 * everything else is trimmed to at most six significant digits. */
export function formatNumber(value: number): string {
  if (Number.isInteger(value)) return value.toString();
  const compact = Number(value.toPrecision(6));
  return compact.toString();
}

export function formatPercent(value: number): string {
  return (value * 100).toFixed(1) + "%";
}
