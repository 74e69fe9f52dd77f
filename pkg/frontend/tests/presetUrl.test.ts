import { describe, expect, it } from "vitest";

import { decodeShareFragment, encodeShareFragment } from "../src/presetUrl.js";
import { defaultConfig, defaultGains } from "../src/state.js";
import { TEST_BOUNDS } from "./fakes.js";

describe("share fragment", () => {
  it("round-trips a full panel setting", () => {
    const config = {
      ...defaultConfig(),
      num_layers: 12,
      kernel_size: 13,
      dilation_growth: 2,
      activation: "leaky_relu",
      init_scheme: "uniform",
      init_param: 0.7,
      depthwise: true,
      seed: "18446744073709551615",
    };
    const gains = { input_gain_db: -6, output_gain_db: 3.5, mix: 0.4, dc_blocker: false };
    const fragment = encodeShareFragment({ config, gains });
    const decoded = decodeShareFragment(fragment, TEST_BOUNDS);
    expect(decoded.config).toEqual(config);
    expect(decoded.gains).toEqual(gains);
    expect(decoded.warnings).toEqual([]);
  });

  it("is versioned", () => {
    const fragment = encodeShareFragment({ config: defaultConfig(), gains: defaultGains() });
    expect(fragment.startsWith("v=1&")).toBe(true);
  });

  it("encodes a default init_param as the word default", () => {
    const fragment = encodeShareFragment({ config: defaultConfig(), gains: defaultGains() });
    expect(fragment).toContain("init_param=default");
  });

  it("accepts a leading # and an empty fragment", () => {
    const withHash = decodeShareFragment(
      "#" + encodeShareFragment({ config: defaultConfig(), gains: defaultGains() }), TEST_BOUNDS);
    expect(withHash.config).toEqual(defaultConfig());
    expect(withHash.warnings).toEqual([]);
    const empty = decodeShareFragment("", TEST_BOUNDS);
    expect(empty.config).toEqual(defaultConfig());
    expect(empty.warnings).toEqual([]);
  });

  it("falls back to defaults with a warning on malformed fragments", () => {
    for (const bad of ["not-a-preset", "v=2&num_layers=4", "num_layers=4"]) {
      const decoded = decodeShareFragment(bad, TEST_BOUNDS);
      expect(decoded.config).toEqual(defaultConfig());
      expect(decoded.gains).toEqual(defaultGains());
      expect(decoded.warnings.length).toBeGreaterThan(0);
    }
  });

  it("clamps out-of-range values from the link and warns", () => {
    const decoded = decodeShareFragment("v=1&kernel_size=500&mix=2", TEST_BOUNDS);
    expect(decoded.config.kernel_size).toBe(64);
    expect(decoded.gains.mix).toBe(1);
    expect(decoded.warnings.length).toBe(2);
  });

  it("ignores unknown fields with a warning", () => {
    const decoded = decodeShareFragment("v=1&flavor=crunchy&num_layers=5", TEST_BOUNDS);
    expect(decoded.config.num_layers).toBe(5);
    expect(decoded.warnings.some((w) => w.includes("flavor"))).toBe(true);
  });

  it("keeps missing fields at their defaults", () => {
    const decoded = decodeShareFragment("v=1&seed=42", TEST_BOUNDS);
    expect(decoded.config).toEqual({ ...defaultConfig(), seed: "42" });
    expect(decoded.gains).toEqual(defaultGains());
    expect(decoded.warnings).toEqual([]);
  });
});
