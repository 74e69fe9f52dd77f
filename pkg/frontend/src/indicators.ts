// Indicator read-outs.  The numbers and the rf_ms_text/seed strings come
// straight off the bridge; this module only assembles the surrounding words,
// which match the CLI describe output so the two surfaces never disagree.

import type { IndicatorState } from "./state.js";

export function receptiveFieldLine(ind: IndicatorState, sampleRate: number): string {
  return `receptive field: ${ind.rf_samples} samples (${ind.rf_ms_text} ms at ${sampleRate} Hz)`;
}

export function parametersLine(ind: IndicatorState): string {
  return `parameters: ${ind.params}`;
}

export function seedLine(ind: IndicatorState): string {
  return `seed: ${ind.seed}`;
}

export function indicatorLines(ind: IndicatorState, sampleRate: number): string[] {
  return [receptiveFieldLine(ind, sampleRate), parametersLine(ind), seedLine(ind)];
}
