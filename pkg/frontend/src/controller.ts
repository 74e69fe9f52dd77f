// Control-panel brain.  Owns the panel state, debounces control edits into
// set_config requests, and keeps one invariant above all: the indicator
// read-outs only ever change when the engine acknowledges a config — a
// mid-drag slider never shows numbers the engine hasn't confirmed.

import { BridgeClient, BridgeRequestError } from "./client.js";
import type { Bounds, ConfigDict } from "./protocol.js";
import {
  clampConfig, clampGains, type ControlPanelState, type GainsState,
  indicatorsFromReply, initialPanelState, randomSeed,
} from "./state.js";

export interface Scheduler {
  schedule(fn: () => void, ms: number): unknown;
  cancel(handle: unknown): void;
}

const timeoutScheduler: Scheduler = {
  schedule: (fn, ms) => setTimeout(fn, ms),
  cancel: (handle) => clearTimeout(handle as Parameters<typeof clearTimeout>[0]),
};

export const DEBOUNCE_MS = 50;

export type StateListener = (state: ControlPanelState) => void;

export type ControlField = keyof ConfigDict | keyof GainsState;

const GAIN_FIELDS: readonly (keyof GainsState)[] = [
  "input_gain_db", "output_gain_db", "mix", "dc_blocker",
];

export class PanelController {
  readonly state: ControlPanelState;
  private readonly client: BridgeClient;
  private readonly scheduler: Scheduler;
  private readonly debounceMs: number;
  private readonly listeners = new Set<StateListener>();
  private bounds: Bounds = {};
  private sampleRateValue = 44100;
  private blockSizeValue = 512;
  private timer: unknown = null;
  private inflight = false;
  private dirty = false;
  private idleWaiters: (() => void)[] = [];

  constructor(client: BridgeClient, opts: { debounceMs?: number; scheduler?: Scheduler } = {}) {
    this.client = client;
    this.scheduler = opts.scheduler ?? timeoutScheduler;
    this.debounceMs = opts.debounceMs ?? DEBOUNCE_MS;
    this.state = initialPanelState();
  }

  get sampleRate(): number {
    return this.sampleRateValue;
  }

  get blockSize(): number {
    return this.blockSizeValue;
  }

  get configBounds(): Bounds {
    return this.bounds;
  }

  subscribe(listener: StateListener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  // Handshake: adopt the served engine's actual config and indicators so the
  // panel starts in agreement with it rather than at local defaults.
  async connect(): Promise<void> {
    this.state.connection = "connecting";
    this.notify();
    try {
      const hello = await this.client.hello();
      this.bounds = hello.bounds;
      this.sampleRateValue = hello.sample_rate;
      this.blockSizeValue = hello.block_size;
      this.state.config = { ...hello.indicators.config };
      this.state.indicators = indicatorsFromReply(hello.indicators);
      this.state.connection = "connected";
    } catch (err) {
      this.state.connection = "disconnected";
      this.notify();
      throw err;
    }
    this.notify();
  }

  // A control edit: clamp, store, and debounce a set_config.  Repeated edits
  // inside the window collapse into one request; edits during an in-flight
  // request are sent right after its acknowledgment.
  onControlChange(field: ControlField, value: unknown): void {
    if ((GAIN_FIELDS as readonly string[]).includes(field)) {
      const clamped = clampGains({ ...this.state.gains, [field]: value });
      this.state.gains = clamped.gains;
    } else {
      const clamped = clampConfig({ ...this.state.config, [field]: value } as Partial<ConfigDict>, this.bounds);
      this.state.config = clamped.config;
    }
    if (this.state.error?.field === field) this.state.error = null;
    this.notify();
    this.schedule();
  }

  // The seed dice: new random seed, same architecture.
  rollSeed(): string {
    const seed = randomSeed();
    this.onControlChange("seed", seed);
    return seed;
  }

  // A whole setting at once (preset link, load button): replaces the state
  // and goes through the same debounced path as any other edit.
  applyShared(config: ConfigDict, gains: GainsState): void {
    this.state.config = { ...config };
    this.state.gains = { ...gains };
    this.state.error = null;
    this.notify();
    this.schedule();
  }

  private schedule(): void {
    if (this.timer !== null) this.scheduler.cancel(this.timer);
    this.timer = this.scheduler.schedule(() => {
      this.timer = null;
      void this.flush();
    }, this.debounceMs);
  }

  private async flush(): Promise<void> {
    if (this.inflight) {
      this.dirty = true;
      return;
    }
    this.inflight = true;
    try {
      const reply = await this.client.setConfig(
        { ...this.state.config },
        { ...this.state.gains },
      );
      this.state.indicators = indicatorsFromReply(reply);
      this.state.error = null;
    } catch (err) {
      if (err instanceof BridgeRequestError) {
        this.state.error = { field: err.field, reason: err.reason };
      } else {
        this.state.connection = "disconnected";
        this.state.error = { field: "", reason: err instanceof Error ? err.message : String(err) };
      }
    } finally {
      this.inflight = false;
    }
    this.notify();
    if (this.dirty && this.state.connection === "connected") {
      this.dirty = false;
      await this.flush();
      return;
    }
    this.dirty = false;
    this.maybeIdle();
  }

  private maybeIdle(): void {
    if (this.timer === null && !this.inflight && !this.dirty) {
      const waiters = this.idleWaiters;
      this.idleWaiters = [];
      for (const wake of waiters) wake();
    }
  }

  // Resolves once no edit is pending, in flight, or queued behind one.
  whenIdle(): Promise<void> {
    if (this.timer === null && !this.inflight && !this.dirty) return Promise.resolve();
    return new Promise((resolve) => this.idleWaiters.push(resolve));
  }
}
