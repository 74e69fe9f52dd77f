// In-memory stand-ins for the bridge: a TextSocket whose replies the test
// scripts, and a manual scheduler so debounce windows fire on demand.

import type { TextSocket } from "../src/client.js";
import type { Scheduler } from "../src/controller.js";
import type { ConfigDict } from "../src/protocol.js";
import { defaultConfig } from "../src/state.js";

export class FakeSocket implements TextSocket {
  sent: string[] = [];
  autoReply: ((msg: Record<string, unknown>) => Record<string, unknown> | null) | null = null;

  private messageHandler: (text: string) => void = () => {};
  private closeHandler: () => void = () => {};

  send(text: string): void {
    this.sent.push(text);
    if (!this.autoReply) return;
    const msg = JSON.parse(text) as Record<string, unknown>;
    const reply = this.autoReply(msg);
    if (reply) {
      queueMicrotask(() => this.deliver({ ...reply, id: msg.id }));
    }
  }

  // Push a server frame to the client (id must be set by the caller).
  deliver(reply: Record<string, unknown>): void {
    this.messageHandler(JSON.stringify(reply));
  }

  sentMessages(): Record<string, unknown>[] {
    return this.sent.map((text) => JSON.parse(text) as Record<string, unknown>);
  }

  lastSent(): Record<string, unknown> {
    if (this.sent.length === 0) throw new Error("nothing sent");
    return JSON.parse(this.sent[this.sent.length - 1]!) as Record<string, unknown>;
  }

  close(): void {
    this.closeHandler();
  }

  onMessage(handler: (text: string) => void): void {
    this.messageHandler = handler;
  }

  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }
}

export class ManualScheduler implements Scheduler {
  private tasks = new Map<number, () => void>();
  private counter = 0;

  schedule(fn: () => void, _ms: number): unknown {
    const id = ++this.counter;
    this.tasks.set(id, fn);
    return id;
  }

  cancel(handle: unknown): void {
    this.tasks.delete(handle as number);
  }

  get pending(): number {
    return this.tasks.size;
  }

  fire(): void {
    const due = [...this.tasks.values()];
    this.tasks.clear();
    for (const fn of due) fn();
  }
}

export const TEST_BOUNDS = {
  num_layers: [1, 32] as [number, number],
  kernel_size: [1, 64] as [number, number],
  dilation_growth: [1, 16] as [number, number],
  channel_width: [1, 64] as [number, number],
  in_channels: [1, 2] as [number, number],
  out_channels: [1, 2] as [number, number],
};

// Canned indicators; values are deliberately arbitrary so tests can prove
// the panel echoes them instead of computing its own.
export function cannedIndicators(config: ConfigDict, extra: Record<string, unknown> = {}) {
  return {
    rf_samples: 999,
    rf_ms: 22.653,
    rf_ms_text: "22.7",
    params: 4321,
    seed: config.seed,
    dead_network: false,
    config,
    ...extra,
  };
}

export function helloReply(config: ConfigDict = defaultConfig()) {
  return {
    type: "hello",
    protocol: 1,
    block_size: 512,
    sample_rate: 44100,
    bounds: TEST_BOUNDS,
    indicators: cannedIndicators(config),
  };
}

// Waits until promise callbacks queued so far have run.
export function settleMicrotasks(rounds = 8): Promise<void> {
  let p = Promise.resolve();
  for (let i = 0; i < rounds; i++) p = p.then(() => undefined);
  return p;
}
