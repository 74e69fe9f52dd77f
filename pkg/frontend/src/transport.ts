// Looped playback through the engine.  The transport slices the loaded
// source into engine-sized blocks, sends each over the bridge, and hands the
// processed audio to a sink.  The loop seam needs no special casing: blocks
// wrap modulo the source length, so the engine's history carries straight
// across the boundary and the seam stays free of resets and clicks.

import type { BridgeClient } from "./client.js";

export interface AudioSink {
  // Called with processed blocks in playback order.  Returning a promise
  // applies backpressure: the pump waits before processing the next block.
  write(block: Float32Array[]): void | Promise<void>;
}

export type TransportSnapshot = {
  fileLoaded: boolean;
  playing: boolean;
  loop: boolean;
  position: number;
  blocksPlayed: number;
};

export class Transport {
  loop = true;

  private readonly client: BridgeClient;
  private readonly blockSize: number;
  private source: Float32Array[] | null = null;
  private pos = 0;
  private playingFlag = false;
  private pump: Promise<void> | null = null;
  private blocksPlayedCount = 0;
  private readonly onChange: (() => void) | undefined;

  constructor(client: BridgeClient, blockSize: number, onChange?: () => void) {
    this.client = client;
    this.blockSize = blockSize;
    this.onChange = onChange;
  }

  get canPlay(): boolean {
    return this.source !== null;
  }

  get playing(): boolean {
    return this.playingFlag;
  }

  get blocksPlayed(): number {
    return this.blocksPlayedCount;
  }

  snapshot(): TransportSnapshot {
    return {
      fileLoaded: this.source !== null,
      playing: this.playingFlag,
      loop: this.loop,
      position: this.pos,
      blocksPlayed: this.blocksPlayedCount,
    };
  }

  // Source audio as planar channels matching the engine's input width.
  load(channels: Float32Array[]): void {
    if (channels.length === 0 || channels[0]!.length === 0) {
      throw new Error("source must have at least one sample");
    }
    const n = channels[0]!.length;
    for (const ch of channels) {
      if (ch.length !== n) throw new Error("channels differ in length");
    }
    this.source = channels.map((ch) => Float32Array.from(ch));
    this.pos = 0;
    this.onChange?.();
  }

  private nextBlock(): Float32Array[] | null {
    const src = this.source!;
    const total = src[0]!.length;
    if (!this.loop && this.pos >= total) return null;
    const n = this.loop ? this.blockSize : Math.min(this.blockSize, total - this.pos);
    const block = src.map((ch) => {
      const out = new Float32Array(n);
      for (let i = 0; i < n; i++) out[i] = ch[(this.pos + i) % total]!;
      return out;
    });
    this.pos = this.loop ? (this.pos + n) % total : this.pos + n;
    return block;
  }

  // Runs until stop() or, with loop off, the end of the source.  Resolves
  // when playback has wound down.
  async play(sink: AudioSink): Promise<void> {
    if (!this.canPlay) throw new Error("no file loaded");
    if (this.playingFlag) return this.pump ?? undefined;
    this.playingFlag = true;
    this.onChange?.();
    const run = async () => {
      try {
        while (this.playingFlag) {
          const block = this.nextBlock();
          if (block === null) break;
          const out = await this.client.processBlock(block);
          this.blocksPlayedCount++;
          if (!this.playingFlag) break; // stopped mid-flight: drop, stay silent
          await sink.write(out);
        }
      } finally {
        this.playingFlag = false;
        this.pump = null;
        this.onChange?.();
      }
    };
    this.pump = run();
    return this.pump;
  }

  // Stop silences output, rewinds, and resets the engine, so the next play
  // starts from a clean history and reproduces the same audio.
  async stop(): Promise<void> {
    this.playingFlag = false;
    const pump = this.pump;
    if (pump) await pump;
    this.pos = 0;
    await this.client.reset();
    this.onChange?.();
  }
}
