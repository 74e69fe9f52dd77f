import { describe, expect, it } from "vitest";

import { indicatorLines } from "../src/indicators.js";
import type { IndicatorState } from "../src/state.js";

const ind: IndicatorState = {
  rf_samples: 131071,
  rf_ms: 2972.13,
  rf_ms_text: "2972.1",
  params: 13378,
  seed: "18446744073709551615",
  dead_network: false,
};

describe("indicator lines", () => {
  it("assembles the exact describe wording around echoed values", () => {
    const lines = indicatorLines({ ...ind, rf_ms: 2972.13 }, 44100);
    expect(lines).toEqual([
      "receptive field: 131071 samples (2972.1 ms at 44100 Hz)",
      "parameters: 13378",
      "seed: 18446744073709551615",
    ]);
  });

  it("uses the echoed rf_ms_text verbatim, never reformatting", () => {
    // A deliberately inconsistent text proves nothing is recomputed.
    const lines = indicatorLines({ ...ind, rf_ms: 1.0, rf_ms_text: "0.3" }, 48000);
    expect(lines[0]).toBe("receptive field: 131071 samples (0.3 ms at 48000 Hz)");
  });
});
