// Browser entry point.  Connects to a locally served engine bridge
// (`tcnfx serve`, default port 8765; override with ?port=NNNN), builds the
// panel, and feeds processed audio into an AudioContext.

import { BridgeClient, type TextSocket } from "./client.js";
import { PanelController } from "./controller.js";
import { buildPanel } from "./panel.js";
import { decodeShareFragment } from "./presetUrl.js";
import type { AudioSink } from "./transport.js";
import { Transport } from "./transport.js";

function webSocketText(url: string): Promise<TextSocket> {
  return new Promise((resolve, reject) => {
    const ws = new WebSocket(url);
    const messageHandlers: ((text: string) => void)[] = [];
    const closeHandlers: (() => void)[] = [];
    ws.onmessage = (event) => {
      for (const handler of messageHandlers) handler(String(event.data));
    };
    ws.onclose = () => {
      for (const handler of closeHandlers) handler();
    };
    ws.onerror = () => reject(new Error(`cannot reach ${url}`));
    ws.onopen = () => resolve({
      send: (text) => ws.send(text),
      close: () => ws.close(),
      onMessage: (handler) => messageHandlers.push(handler),
      onClose: (handler) => closeHandlers.push(handler),
    });
  });
}

// Queues processed blocks onto the audio clock; backpressure keeps roughly
// 150 ms buffered so control edits stay responsive.
class ContextSink implements AudioSink {
  private nextTime = 0;

  constructor(private readonly ctx: AudioContext) {}

  write(block: Float32Array[]): Promise<void> | void {
    const frames = block[0]?.length ?? 0;
    if (frames === 0) return;
    const buffer = this.ctx.createBuffer(block.length, frames, this.ctx.sampleRate);
    block.forEach((ch, i) => buffer.copyToChannel(ch as Float32Array<ArrayBuffer>, i));
    const node = this.ctx.createBufferSource();
    node.buffer = buffer;
    node.connect(this.ctx.destination);
    const startAt = Math.max(this.ctx.currentTime + 0.02, this.nextTime);
    node.start(startAt);
    this.nextTime = startAt + buffer.duration;
    const ahead = this.nextTime - this.ctx.currentTime;
    if (ahead > 0.15) {
      return new Promise((resolve) => setTimeout(resolve, (ahead - 0.15) * 1000));
    }
  }
}

function toEngineChannels(decoded: AudioBuffer, inChannels: number): Float32Array[] {
  const first = decoded.getChannelData(0);
  if (inChannels === 1) {
    if (decoded.numberOfChannels === 1) return [Float32Array.from(first)];
    const mono = new Float32Array(decoded.length);
    for (let c = 0; c < decoded.numberOfChannels; c++) {
      const ch = decoded.getChannelData(c);
      for (let i = 0; i < mono.length; i++) mono[i]! += ch[i]! / decoded.numberOfChannels;
    }
    return [mono];
  }
  const second = decoded.numberOfChannels > 1 ? decoded.getChannelData(1) : first;
  return [Float32Array.from(first), Float32Array.from(second)];
}

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");

  const params = new URLSearchParams(location.search);
  const port = params.get("port") ?? "8765";
  const socket = await webSocketText(`ws://${location.hostname || "127.0.0.1"}:${port}`);

  const client = new BridgeClient(socket);
  const controller = new PanelController(client);
  await controller.connect();

  const ctx = new AudioContext({ sampleRate: controller.sampleRate });
  const sink = new ContextSink(ctx);
  const transport = new Transport(client, controller.blockSize);

  buildPanel(root, controller, transport, {
    loadFile: async (file) => {
      const decoded = await ctx.decodeAudioData(await file.arrayBuffer());
      transport.load(toEngineChannels(decoded, controller.state.config.in_channels));
    },
    play: () => {
      void ctx.resume();
      void transport.play(sink);
    },
    stop: () => {
      void transport.stop();
    },
  });

  if (location.hash.length > 1) {
    const shared = decodeShareFragment(location.hash, controller.configBounds);
    for (const warning of shared.warnings) console.warn(warning);
    controller.applyShared(shared.config, shared.gains);
  }
}

void start().catch((err) => {
  const root = document.getElementById("app");
  if (root) root.textContent = `failed to start: ${err instanceof Error ? err.message : err}`;
});
