// Panel state and the clamping rules that keep every control inside the
// bounds the engine itself validates.  The engine remains the authority: the
// panel clamps eagerly so sliders can't even express an illegal value, and
// anything it can't fix locally comes back as an inline bridge error.

import type { Bounds, ConfigDict, Indicators } from "./protocol.js";

// Mirrors the engine's selection-box inventory.  The bridge hello carries
// numeric bounds only, so the enum choices live here.
export const ACTIVATIONS = ["linear", "relu", "tanh", "sigmoid", "softsign", "leaky_relu"] as const;
export const INIT_SCHEMES = ["normal", "uniform", "glorot_uniform", "he_normal"] as const;

// Schemes that accept an init_param; the others derive their scale.
export const PARAMETRIC_SCHEMES = ["normal", "uniform"] as const;

export const MAX_SEED = 2n ** 64n - 1n;

export type GainsState = {
  input_gain_db: number;
  output_gain_db: number;
  mix: number;
  dc_blocker: boolean;
};

export type IndicatorState = {
  rf_samples: number;
  rf_ms: number;
  rf_ms_text: string;
  params: number;
  seed: string;
  dead_network: boolean;
};

export type TransportState = {
  fileLoaded: boolean;
  playing: boolean;
  loop: boolean;
};

export type ConnectionStatus = "disconnected" | "connecting" | "connected";

export type InlineError = { field: string; reason: string } | null;

// config holds the control positions (clamped, possibly not yet sent);
// indicators hold what the engine last acknowledged.  The two only agree
// after a round-trip, and the display always trusts indicators.
export type ControlPanelState = {
  config: ConfigDict;
  gains: GainsState;
  indicators: IndicatorState;
  transport: TransportState;
  connection: ConnectionStatus;
  error: InlineError;
};

export function defaultConfig(): ConfigDict {
  return {
    num_layers: 3,
    kernel_size: 3,
    dilation_growth: 2,
    channel_width: 8,
    in_channels: 1,
    out_channels: 1,
    activation: "tanh",
    init_scheme: "normal",
    init_param: null,
    depthwise: false,
    use_bias: false,
    seed: "0",
  };
}

export function defaultGains(): GainsState {
  return { input_gain_db: 0, output_gain_db: 0, mix: 1, dc_blocker: true };
}

export function initialPanelState(): ControlPanelState {
  return {
    config: defaultConfig(),
    gains: defaultGains(),
    indicators: {
      rf_samples: 0,
      rf_ms: 0,
      rf_ms_text: "0.0",
      params: 0,
      seed: "0",
      dead_network: false,
    },
    transport: { fileLoaded: false, playing: false, loop: true },
    connection: "disconnected",
    error: null,
  };
}

export function indicatorsFromReply(reply: Indicators): IndicatorState {
  return {
    rf_samples: reply.rf_samples,
    rf_ms: reply.rf_ms,
    rf_ms_text: reply.rf_ms_text,
    params: reply.params,
    seed: reply.seed,
    dead_network: reply.dead_network,
  };
}

// Valid seeds are decimal strings for 0 .. 2^64-1.  Returns the normalized
// string, or null when the text is not a seed at all.
export function normalizeSeed(value: unknown): string | null {
  let text: string;
  if (typeof value === "number") {
    if (!Number.isSafeInteger(value) || value < 0) return null;
    text = String(value);
  } else if (typeof value === "string") {
    text = value.trim();
  } else {
    return null;
  }
  if (!/^[0-9]+$/.test(text)) return null;
  const n = BigInt(text);
  if (n > MAX_SEED) return null;
  return n.toString();
}

export function randomSeed(): string {
  const words = new Uint32Array(2);
  const cryptoApi = (globalThis as { crypto?: Crypto }).crypto;
  if (cryptoApi?.getRandomValues) {
    cryptoApi.getRandomValues(words);
  } else {
    words[0] = Math.floor(Math.random() * 0x100000000);
    words[1] = Math.floor(Math.random() * 0x100000000);
  }
  return ((BigInt(words[0]!) << 32n) | BigInt(words[1]!)).toString();
}

export type ClampResult = { config: ConfigDict; warnings: string[] };

function clampNumber(value: number, lo: number, hi: number): number {
  const rounded = Math.round(value);
  return Math.min(hi, Math.max(lo, rounded));
}

// Builds a fully valid config from untrusted partial input (URL fragments,
// slider callbacks).  Every correction is reported as a warning so the panel
// can surface it; the result is always sendable.
export function clampConfig(partial: Partial<ConfigDict>, bounds: Bounds): ClampResult {
  const config = defaultConfig();
  const warnings: string[] = [];

  const numericFields = [
    "num_layers", "kernel_size", "dilation_growth",
    "channel_width", "in_channels", "out_channels",
  ] as const;
  for (const field of numericFields) {
    const raw = partial[field];
    if (raw === undefined) continue;
    const range = bounds[field];
    if (!range) continue;
    const value = typeof raw === "number" ? raw : Number(raw);
    if (!Number.isFinite(value)) {
      warnings.push(`${field}: not a number, using ${config[field]}`);
      continue;
    }
    const clamped = clampNumber(value, range[0], range[1]);
    if (clamped !== value) warnings.push(`${field}: ${value} clamped to ${clamped}`);
    config[field] = clamped;
  }

  if (partial.activation !== undefined) {
    if ((ACTIVATIONS as readonly string[]).includes(partial.activation)) {
      config.activation = partial.activation;
    } else {
      warnings.push(`activation: unknown ${JSON.stringify(partial.activation)}, using ${config.activation}`);
    }
  }
  if (partial.init_scheme !== undefined) {
    if ((INIT_SCHEMES as readonly string[]).includes(partial.init_scheme)) {
      config.init_scheme = partial.init_scheme;
    } else {
      warnings.push(`init_scheme: unknown ${JSON.stringify(partial.init_scheme)}, using ${config.init_scheme}`);
    }
  }

  if (partial.init_param !== undefined && partial.init_param !== null) {
    const value = Number(partial.init_param);
    if (!Number.isFinite(value) || value < 0) {
      warnings.push(`init_param: ${partial.init_param} is not a non-negative number, using default`);
    } else if (!(PARAMETRIC_SCHEMES as readonly string[]).includes(config.init_scheme)) {
      warnings.push(`init_param: ${config.init_scheme} derives its own scale, ignoring`);
    } else {
      config.init_param = value;
    }
  }

  if (partial.depthwise !== undefined) config.depthwise = Boolean(partial.depthwise);
  if (partial.use_bias !== undefined) config.use_bias = Boolean(partial.use_bias);

  if (partial.seed !== undefined) {
    const seed = normalizeSeed(partial.seed);
    if (seed === null) {
      warnings.push(`seed: ${JSON.stringify(partial.seed)} is not a decimal 64-bit seed, using ${config.seed}`);
    } else {
      config.seed = seed;
    }
  }

  return { config, warnings };
}

export type GainsClampResult = { gains: GainsState; warnings: string[] };

// The engine accepts any finite dB gain; ±40 dB is the slider span the
// panel exposes.  mix 0..1 is an engine rule.
export const GAIN_DB_RANGE: [number, number] = [-40, 40];

export function clampGains(partial: Partial<GainsState>): GainsClampResult {
  const gains = defaultGains();
  const warnings: string[] = [];
  for (const field of ["input_gain_db", "output_gain_db"] as const) {
    const raw = partial[field];
    if (raw === undefined) continue;
    const value = Number(raw);
    if (!Number.isFinite(value)) {
      warnings.push(`${field}: not a number, using ${gains[field]}`);
      continue;
    }
    const clamped = Math.min(GAIN_DB_RANGE[1], Math.max(GAIN_DB_RANGE[0], value));
    if (clamped !== value) warnings.push(`${field}: ${value} clamped to ${clamped}`);
    gains[field] = clamped;
  }
  if (partial.mix !== undefined) {
    const value = Number(partial.mix);
    if (!Number.isFinite(value)) {
      warnings.push(`mix: not a number, using ${gains.mix}`);
    } else {
      const clamped = Math.min(1, Math.max(0, value));
      if (clamped !== value) warnings.push(`mix: ${value} clamped to ${clamped}`);
      gains.mix = clamped;
    }
  }
  if (partial.dc_blocker !== undefined) gains.dc_blocker = Boolean(partial.dc_blocker);
  return { gains, warnings };
}
