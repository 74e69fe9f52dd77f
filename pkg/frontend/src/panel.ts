// DOM construction and wiring for the control panel.  Pure browser code:
// every behavior lives in controller/transport/state, so this file only maps
// inputs to onControlChange calls and state back onto elements.

import { PanelController } from "./controller.js";
import { indicatorLines } from "./indicators.js";
import { encodeShareFragment } from "./presetUrl.js";
import type { ControlPanelState } from "./state.js";
import { ACTIVATIONS, GAIN_DB_RANGE, INIT_SCHEMES, PARAMETRIC_SCHEMES } from "./state.js";
import type { Transport } from "./transport.js";

type Attrs = Record<string, string | boolean | number>;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, attrs: Attrs = {}, ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, String(value));
    }
  }
  node.append(...children);
  return node;
}

export type PanelHooks = {
  loadFile: (file: File) => Promise<void>;
  play: () => void;
  stop: () => void;
};

export function buildPanel(
  root: HTMLElement,
  controller: PanelController,
  transport: Transport,
  hooks: PanelHooks,
): void {
  const errorSlots = new Map<string, HTMLElement>();
  const updaters: ((state: ControlPanelState) => void)[] = [];

  function row(field: string, label: string, input: HTMLElement): HTMLElement {
    const error = el("span", { class: "inline-error" });
    errorSlots.set(field, error);
    return el("div", { class: "control-row" },
      el("label", { for: field }, label), input, error);
  }

  function slider(field: string, label: string, lo: number, hi: number, step = 1): HTMLElement {
    const input = el("input", { type: "range", id: field, min: lo, max: hi, step, value: lo });
    const readout = el("span", { class: "value" });
    input.addEventListener("input", () => controller.onControlChange(field as never, Number(input.value)));
    updaters.push((state) => {
      const value = (state.config as Record<string, unknown>)[field]
        ?? (state.gains as Record<string, unknown>)[field];
      input.value = String(value);
      readout.textContent = String(value);
    });
    const wrap = el("span", {}, input, readout);
    return row(field, label, wrap);
  }

  function select(field: string, label: string, choices: readonly string[]): HTMLElement {
    const input = el("select", { id: field },
      ...choices.map((c) => el("option", { value: c }, c)));
    input.addEventListener("change", () => controller.onControlChange(field as never, input.value));
    updaters.push((state) => {
      input.value = String((state.config as Record<string, unknown>)[field]);
    });
    return row(field, label, input);
  }

  function checkbox(field: string, label: string): HTMLElement {
    const input = el("input", { type: "checkbox", id: field });
    input.addEventListener("change", () => controller.onControlChange(field as never, input.checked));
    updaters.push((state) => {
      input.checked = Boolean((state.config as Record<string, unknown>)[field]
        ?? (state.gains as Record<string, unknown>)[field]);
    });
    return row(field, label, input);
  }

  const bounds = controller.configBounds;
  const range = (field: string, fallback: [number, number]) => bounds[field] ?? fallback;

  // Network controls.
  const network = el("fieldset", {}, el("legend", {}, "network"));
  network.append(
    slider("num_layers", "layers", ...range("num_layers", [1, 32])),
    slider("kernel_size", "kernel", ...range("kernel_size", [1, 64])),
    slider("dilation_growth", "dilation growth", ...range("dilation_growth", [1, 16])),
    slider("channel_width", "channels", ...range("channel_width", [1, 64])),
    select("in_channels", "input channels", ["1", "2"]),
    select("out_channels", "output channels", ["1", "2"]),
    select("activation", "activation", ACTIVATIONS),
    select("init_scheme", "weight scheme", INIT_SCHEMES),
    checkbox("depthwise", "depthwise"),
    checkbox("use_bias", "bias"),
  );

  // in/out channel selects deliver strings; route through Number.
  for (const field of ["in_channels", "out_channels"]) {
    const input = network.querySelector<HTMLSelectElement>(`#${field}`)!;
    input.addEventListener("change", () => controller.onControlChange(field as never, Number(input.value)));
  }

  // init_param: blank means "scheme default".
  const initParam = el("input", { type: "number", id: "init_param", step: "0.01", min: "0" });
  initParam.addEventListener("change", () => {
    controller.onControlChange("init_param", initParam.value === "" ? null : Number(initParam.value));
  });
  updaters.push((state) => {
    initParam.value = state.config.init_param === null ? "" : String(state.config.init_param);
    initParam.disabled = !(PARAMETRIC_SCHEMES as readonly string[]).includes(state.config.init_scheme);
  });
  network.append(row("init_param", "init param", initParam));

  // Seed: text entry plus the dice.
  const seedInput = el("input", { type: "text", id: "seed", size: 22 });
  seedInput.addEventListener("change", () => controller.onControlChange("seed", seedInput.value));
  const dice = el("button", { type: "button" }, "🎲");
  dice.addEventListener("click", () => controller.rollSeed());
  updaters.push((state) => {
    seedInput.value = state.config.seed;
  });
  network.append(row("seed", "seed", el("span", {}, seedInput, dice)));

  // Gain section.
  const gains = el("fieldset", {}, el("legend", {}, "gain"));
  gains.append(
    slider("input_gain_db", "input gain (dB)", GAIN_DB_RANGE[0], GAIN_DB_RANGE[1], 0.5),
    slider("output_gain_db", "output gain (dB)", GAIN_DB_RANGE[0], GAIN_DB_RANGE[1], 0.5),
    slider("mix", "mix", 0, 1, 0.01),
    checkbox("dc_blocker", "dc blocker"),
  );

  // Indicators: echoed engine values, displayed verbatim.
  const indicators = el("pre", { class: "indicators" });
  const deadBadge = el("span", { class: "dead-badge" });
  updaters.push((state) => {
    indicators.textContent = indicatorLines(state.indicators, controller.sampleRate).join("\n");
    deadBadge.textContent = state.indicators.dead_network ? "dead network (silent output)" : "";
  });

  // Transport.
  const fileInput = el("input", { type: "file", accept: "audio/*" });
  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (file) void hooks.loadFile(file);
  });
  const playBtn = el("button", { type: "button" }, "play");
  playBtn.addEventListener("click", () => hooks.play());
  const stopBtn = el("button", { type: "button" }, "stop");
  stopBtn.addEventListener("click", () => hooks.stop());
  const loopBox = el("input", { type: "checkbox", id: "loop", checked: true });
  loopBox.addEventListener("change", () => {
    transport.loop = loopBox.checked;
  });
  const transportRow = el("div", { class: "transport" },
    fileInput, playBtn, stopBtn, el("label", { for: "loop" }, "loop"), loopBox);
  const refreshTransport = () => {
    playBtn.disabled = !transport.canPlay || transport.playing;
    stopBtn.disabled = !transport.playing;
    loopBox.checked = transport.loop;
  };
  updaters.push(refreshTransport);

  // Share link.
  const share = el("button", { type: "button" }, "copy share link");
  share.addEventListener("click", () => {
    const fragment = encodeShareFragment({
      config: controller.state.config,
      gains: controller.state.gains,
    });
    location.hash = fragment;
    void navigator.clipboard?.writeText(location.href);
  });

  const status = el("span", { class: "status" });
  updaters.push((state) => {
    status.textContent = state.connection;
    status.className = `status status-${state.connection}`;
  });

  root.append(
    el("div", { class: "header" }, el("h1", {}, "tcnfx panel"), status),
    indicators, deadBadge, network, gains, transportRow, share,
  );

  function render(state: ControlPanelState): void {
    for (const update of updaters) update(state);
    for (const [field, slot] of errorSlots) {
      slot.textContent = state.error?.field === field ? state.error.reason : "";
    }
    if (state.error && !errorSlots.has(state.error.field)) {
      status.textContent = `${state.connection} — ${state.error.reason}`;
    }
  }

  controller.subscribe(render);
  render(controller.state);
}
