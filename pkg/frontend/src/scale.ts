/** Axis scales: linear for SNR, base-10 log for SER. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error("log scale requires a positive domain");
  }
  const inner = linearScale([Math.log10(d0), Math.log10(d1)], range);
  const scale = ((value: number) => inner(Math.log10(value))) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

/** Powers of ten covering [lo, hi], e.g. 1e-4 .. 1e0. */
export function decadeTicks(lo: number, hi: number): number[] {
  const first = Math.floor(Math.log10(lo));
  const last = Math.ceil(Math.log10(hi));
  const ticks: number[] = [];
  for (let k = first; k <= last; k++) {
    ticks.push(Number(`1e${k}`)); // Math.pow(10, -4) !== 1e-4
  }
  return ticks;
}

/** Round a decade value to its exact exponent label, e.g. 0.001 -> "1e-3". */
export function decadeLabel(value: number): string {
  return `1e${Math.round(Math.log10(value))}`;
}

/** Expand a degenerate single-value domain so the scale stays usable. */
export function padDomain([lo, hi]: [number, number], pad = 1): [number, number] {
  return lo === hi ? [lo - pad, hi + pad] : [lo, hi];
}
