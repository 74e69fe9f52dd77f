// Wire types for the engine bridge: JSON text frames over a local
// WebSocket.  Every request may carry an "id"; the engine echoes it on the
// reply, success or error, so requests can be correlated.

export const PROTOCOL_VERSION = 1;

// seed is a decimal string because it may exceed Number.MAX_SAFE_INTEGER.
export type ConfigDict = {
  num_layers: number;
  kernel_size: number;
  dilation_growth: number;
  channel_width: number;
  in_channels: number;
  out_channels: number;
  activation: string;
  init_scheme: string;
  init_param: number | null;
  depthwise: boolean;
  use_bias: boolean;
  seed: string;
};

export type ConfigPatch = Partial<ConfigDict>;

export type GainsPatch = {
  input_gain_db?: number;
  output_gain_db?: number;
  mix?: number;
  dc_blocker?: boolean;
};

// [lo, hi] inclusive, keyed by numeric ConfigDict field.
export type Bounds = Record<string, [number, number]>;

// rf_ms_text and seed are pre-formatted by the engine; the panel displays
// them verbatim and never re-derives them.
export type Indicators = {
  rf_samples: number;
  rf_ms: number;
  rf_ms_text: string;
  params: number;
  seed: string;
  dead_network: boolean;
  config: ConfigDict;
};

export type RequestId = number | string;

export type HelloReply = {
  type: "hello";
  protocol: number;
  block_size: number;
  sample_rate: number;
  bounds: Bounds;
  indicators: Indicators;
  id?: RequestId;
};

export type IndicatorsReply = Indicators & { type: "indicators"; id?: RequestId };

export type AudioBlockReply = {
  type: "audio_block";
  n: number;
  channels: number;
  samples: string;
  id?: RequestId;
};

export type OkReply = { type: "ok"; id?: RequestId };

export type ErrorReply = { type: "error"; field: string; reason: string; id?: RequestId };

export type Reply = HelloReply | IndicatorsReply | AudioBlockReply | OkReply | ErrorReply;

function bytesToBase64(bytes: Uint8Array): string {
  if (typeof Buffer !== "undefined") {
    return Buffer.from(bytes.buffer, bytes.byteOffset, bytes.byteLength).toString("base64");
  }
  let binary = "";
  for (let i = 0; i < bytes.length; i++) binary += String.fromCharCode(bytes[i]!);
  return btoa(binary);
}

function base64ToBytes(text: string): Uint8Array {
  if (typeof Buffer !== "undefined") {
    const buf = Buffer.from(text, "base64");
    return new Uint8Array(buf.buffer, buf.byteOffset, buf.byteLength);
  }
  const binary = atob(text);
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) bytes[i] = binary.charCodeAt(i);
  return bytes;
}

// Samples travel planar (all of channel 0, then channel 1) as little-endian
// float32, base64-encoded.  DataView keeps the byte order explicit.
export function encodeSamples(block: Float32Array[]): string {
  const channels = block.length;
  const n = channels > 0 ? block[0]!.length : 0;
  const bytes = new Uint8Array(channels * n * 4);
  const view = new DataView(bytes.buffer);
  let off = 0;
  for (const ch of block) {
    if (ch.length !== n) throw new Error("channels differ in length");
    for (let i = 0; i < n; i++) {
      view.setFloat32(off, ch[i]!, true);
      off += 4;
    }
  }
  return bytesToBase64(bytes);
}

export function decodeSamples(text: string, channels: number, n: number): Float32Array[] {
  const bytes = base64ToBytes(text);
  const expected = channels * n * 4;
  if (bytes.length !== expected) {
    throw new Error(`expected ${expected} bytes for ${channels}x${n} float32 samples, got ${bytes.length}`);
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const out: Float32Array[] = [];
  let off = 0;
  for (let c = 0; c < channels; c++) {
    const ch = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      ch[i] = view.getFloat32(off, true);
      off += 4;
    }
    out.push(ch);
  }
  return out;
}
