// Shareable preset links.  The whole panel setting (network config + gains)
// is encoded as versioned query parameters inside the URL fragment:
//
//   #v=1&num_layers=4&kernel_size=13&...&seed=42&mix=0.8&dc_blocker=true
//
// Values follow the preset-file conventions: booleans are true/false, a
// default init_param is the word "default", seeds are decimal strings.
// Decoding is forgiving — anything malformed falls back to defaults with a
// warning, and numbers out of range are clamped like any other control edit.

import type { Bounds, ConfigDict } from "./protocol.js";
import {
  clampConfig, clampGains, defaultConfig, defaultGains, type GainsState,
} from "./state.js";

export const SHARE_VERSION = 1;

const CONFIG_KEYS: (keyof ConfigDict)[] = [
  "num_layers", "kernel_size", "dilation_growth", "channel_width",
  "in_channels", "out_channels", "activation", "init_scheme", "init_param",
  "depthwise", "use_bias", "seed",
];
const GAIN_KEYS: (keyof GainsState)[] = ["input_gain_db", "output_gain_db", "mix", "dc_blocker"];

export type SharedState = { config: ConfigDict; gains: GainsState };
export type DecodeResult = SharedState & { warnings: string[] };

function formatValue(value: number | string | boolean | null): string {
  if (value === null) return "default";
  if (typeof value === "boolean") return value ? "true" : "false";
  return String(value);
}

export function encodeShareFragment(state: SharedState): string {
  const params = new URLSearchParams();
  params.set("v", String(SHARE_VERSION));
  for (const key of CONFIG_KEYS) params.set(key, formatValue(state.config[key]));
  for (const key of GAIN_KEYS) params.set(key, formatValue(state.gains[key]));
  return params.toString();
}

function parseValue(key: string, raw: string): string | number | boolean | null {
  if (key === "depthwise" || key === "use_bias" || key === "dc_blocker") {
    return raw === "true";
  }
  if (key === "activation" || key === "init_scheme" || key === "seed") return raw;
  if (key === "init_param") return raw === "default" ? null : Number(raw);
  return Number(raw);
}

export function decodeShareFragment(fragment: string, bounds: Bounds): DecodeResult {
  const warnings: string[] = [];
  const fallback = (why: string): DecodeResult => {
    warnings.push(why);
    return { config: defaultConfig(), gains: defaultGains(), warnings };
  };

  const raw = fragment.startsWith("#") ? fragment.slice(1) : fragment;
  if (!raw) return { config: defaultConfig(), gains: defaultGains(), warnings };

  let params: URLSearchParams;
  try {
    params = new URLSearchParams(raw);
  } catch {
    return fallback("unreadable preset link, using defaults");
  }
  const version = params.get("v");
  if (version === null) return fallback("preset link has no version, using defaults");
  if (version !== String(SHARE_VERSION)) {
    return fallback(`preset link version ${version} is not supported, using defaults`);
  }

  const configPatch: Partial<Record<keyof ConfigDict, unknown>> = {};
  const gainsPatch: Partial<Record<keyof GainsState, unknown>> = {};
  for (const [key, value] of params) {
    if (key === "v") continue;
    if ((CONFIG_KEYS as string[]).includes(key)) {
      configPatch[key as keyof ConfigDict] = parseValue(key, value);
    } else if ((GAIN_KEYS as string[]).includes(key)) {
      gainsPatch[key as keyof GainsState] = parseValue(key, value);
    } else {
      warnings.push(`unknown preset field ${JSON.stringify(key)} ignored`);
    }
  }

  const clampedConfig = clampConfig(configPatch as Partial<ConfigDict>, bounds);
  const clampedGains = clampGains(gainsPatch as Partial<GainsState>);
  warnings.push(...clampedConfig.warnings, ...clampedGains.warnings);
  return { config: clampedConfig.config, gains: clampedGains.gains, warnings };
}
