// Request/reply client for the engine bridge.  The transport is injected as
// a minimal text socket so the same client runs over a browser WebSocket, a
// node socket in tests, or an in-memory fake.

import type {
  AudioBlockReply, ConfigPatch, GainsPatch, HelloReply, IndicatorsReply,
  Reply,
} from "./protocol.js";
import { decodeSamples, encodeSamples } from "./protocol.js";

export interface TextSocket {
  send(text: string): void;
  close(): void;
  onMessage(handler: (text: string) => void): void;
  onClose(handler: () => void): void;
}

// A structured refusal from the engine: which field and why.
export class BridgeRequestError extends Error {
  readonly field: string;
  readonly reason: string;

  constructor(field: string, reason: string) {
    super(field ? `${field}: ${reason}` : reason);
    this.name = "BridgeRequestError";
    this.field = field;
    this.reason = reason;
  }
}

type Pending = { resolve: (reply: Reply) => void; reject: (err: Error) => void };

export class BridgeClient {
  private readonly socket: TextSocket;
  private nextId = 1;
  private readonly pending = new Map<number, Pending>();
  private closed = false;

  constructor(socket: TextSocket) {
    this.socket = socket;
    socket.onMessage((text) => this.dispatch(text));
    socket.onClose(() => this.failAll(new Error("bridge connection closed")));
  }

  private dispatch(text: string): void {
    let reply: Reply;
    try {
      reply = JSON.parse(text) as Reply;
    } catch {
      return; // not a protocol frame; nothing to correlate it with
    }
    const id = reply.id;
    if (typeof id !== "number") return;
    const entry = this.pending.get(id);
    if (!entry) return;
    this.pending.delete(id);
    if (reply.type === "error") {
      entry.reject(new BridgeRequestError(reply.field, reply.reason));
    } else {
      entry.resolve(reply);
    }
  }

  private failAll(err: Error): void {
    this.closed = true;
    const waiting = [...this.pending.values()];
    this.pending.clear();
    for (const entry of waiting) entry.reject(err);
  }

  get pendingCount(): number {
    return this.pending.size;
  }

  request(message: Record<string, unknown>): Promise<Reply> {
    if (this.closed) return Promise.reject(new Error("bridge connection closed"));
    const id = this.nextId++;
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      try {
        this.socket.send(JSON.stringify({ ...message, id }));
      } catch (err) {
        this.pending.delete(id);
        reject(err instanceof Error ? err : new Error(String(err)));
      }
    });
  }

  private async expect<T extends Reply>(message: Record<string, unknown>, type: T["type"]): Promise<T> {
    const reply = await this.request(message);
    if (reply.type !== type) {
      throw new Error(`expected ${type} reply, got ${reply.type}`);
    }
    return reply as T;
  }

  hello(): Promise<HelloReply> {
    return this.expect<HelloReply>({ type: "hello" }, "hello");
  }

  setConfig(config: ConfigPatch, gains?: GainsPatch): Promise<IndicatorsReply> {
    const message: Record<string, unknown> = { type: "set_config", config };
    if (gains !== undefined) message.gains = gains;
    return this.expect<IndicatorsReply>(message, "indicators");
  }

  async processBlock(block: Float32Array[]): Promise<Float32Array[]> {
    const n = block[0]?.length ?? 0;
    const reply = await this.expect<AudioBlockReply>({
      type: "audio_block",
      n,
      channels: block.length,
      samples: encodeSamples(block),
    }, "audio_block");
    return decodeSamples(reply.samples, reply.channels, reply.n);
  }

  async reset(): Promise<void> {
    await this.expect({ type: "reset" }, "ok");
  }

  close(): void {
    this.closed = true;
    this.socket.close();
    this.failAll(new Error("bridge connection closed"));
  }
}
