"""Command-line front door: render, describe, bench, preset, serve.

Config flags mirror preset fields one-to-one and override values loaded
with --preset; unset flags keep the preset (or default) value. All
errors name the offending field on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace

import numpy as np

from .audio import AudioBuffer, gain_to_db
from .bench import (
    DEFAULT_SECONDS,
    DEFAULT_TIME_BUDGET,
    default_sweep,
    format_csv,
    format_report,
    run_sweep,
)
from .bridge import BridgeServer
from .config import describe_lines, rf_milliseconds
from .engine import DEFAULT_BLOCK_SIZE, StreamEngine
from .errors import TcnfxError
from .presets import DEFAULT_PRESET, Preset, load_preset, save_preset, serialize_preset
from .wavio import WRITE_FORMATS, read_wav, write_wav

# (flag dest, NetworkConfig field)
_CONFIG_FLAGS = [
    ("layers", "num_layers"),
    ("kernel", "kernel_size"),
    ("dilation_growth", "dilation_growth"),
    ("channels", "channel_width"),
    ("in_ch", "in_channels"),
    ("out_ch", "out_channels"),
    ("activation", "activation"),
    ("init", "init_scheme"),
    ("init_param", "init_param"),
    ("depthwise", "depthwise"),
    ("bias", "use_bias"),
    ("seed", "seed"),
]

_GAIN_FLAGS = [
    ("input_gain", "input_gain_db"),
    ("output_gain", "output_gain_db"),
    ("mix", "mix"),
    ("dc_blocker", "dc_blocker"),
]


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("network")
    g.add_argument("--layers", type=int, help="number of conv+activation blocks")
    g.add_argument("--kernel", type=int, help="kernel size of every layer")
    g.add_argument("--dilation-growth", type=int,
                   help="dilation base; layer l uses dilation growth**l")
    g.add_argument("--channels", type=int, help="hidden channel width")
    g.add_argument("--in-ch", type=int, help="input channels (1 or 2)")
    g.add_argument("--out-ch", type=int, help="output channels (1 or 2)")
    g.add_argument("--activation", help="linear, relu, tanh, sigmoid, softsign, leaky_relu")
    g.add_argument("--init", help="weight scheme: normal, uniform, glorot_uniform, he_normal")
    g.add_argument("--init-param", type=float,
                   help="distribution parameter for normal/uniform schemes")
    g.add_argument("--depthwise", action=argparse.BooleanOptionalAction,
                   help="depthwise hidden layers")
    g.add_argument("--bias", action=argparse.BooleanOptionalAction,
                   help="add per-channel biases")
    g.add_argument("--seed", type=int, help="weight seed; the preset's identity")
    p.add_argument("--preset", metavar="FILE", help="preset file; flags override its values")


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("engine")
    g.add_argument("--block-size", type=int, default=None,
                   help=f"streaming block size (default {DEFAULT_BLOCK_SIZE})")
    g.add_argument("--input-gain", type=float, help="input gain in dB")
    g.add_argument("--output-gain", type=float, help="output gain in dB")
    g.add_argument("--mix", type=float, help="wet/dry mix in [0, 1]")
    g.add_argument("--dc-blocker", action=argparse.BooleanOptionalAction,
                   help="10 Hz high-pass on the wet path")
    g.add_argument("--name", help="preset display name (stored in preset files)")


def preset_from_args(args) -> Preset:
    """Layer CLI flags over an optional preset file (flags win)."""
    base = load_preset(args.preset) if getattr(args, "preset", None) else DEFAULT_PRESET
    config_over = {}
    for dest, field in _CONFIG_FLAGS:
        v = getattr(args, dest, None)
        if v is not None:
            config_over[field] = v
    gain_over = {}
    for dest, field in _GAIN_FLAGS:
        v = getattr(args, dest, None)
        if v is not None:
            gain_over[field] = v
    if getattr(args, "name", None) is not None:
        gain_over["name"] = args.name
    config = replace(base.config, **config_over) if config_over else base.config
    return replace(base, config=config, **gain_over)


def _engine_from_preset(preset: Preset, block_size: int, sample_rate: int) -> StreamEngine:
    return StreamEngine(
        preset.config, block_size, sample_rate,
        input_gain_db=preset.input_gain_db,
        output_gain_db=preset.output_gain_db,
        mix=preset.mix,
        dc_blocker=preset.dc_blocker,
    )


def cmd_render(args) -> int:
    buf = read_wav(args.input)
    preset = preset_from_args(args)
    # Without an explicit source, channel counts follow the input file.
    cfg = preset.config
    if args.in_ch is None and args.preset is None and cfg.in_channels != buf.channels:
        cfg = replace(cfg, in_channels=buf.channels)
    if args.out_ch is None and args.preset is None and cfg.out_channels != buf.channels:
        cfg = replace(cfg, out_channels=buf.channels)
    preset = replace(preset, config=cfg)

    n = args.block_size or DEFAULT_BLOCK_SIZE
    engine = _engine_from_preset(preset, n, buf.sample_rate)

    rf = engine.receptive_field
    print(f"input: {args.input} ({buf.channels} ch, {buf.length} samples, "
          f"{buf.sample_rate} Hz)")
    for line in describe_lines(engine.config, buf.sample_rate):
        print(line)
    print(f"receptive field is {rf_milliseconds(rf, buf.sample_rate):.0f} ms "
          f"at {buf.sample_rate} Hz")
    if engine.dead_network:
        print("warning: network output is silent (dead network); makeup left at 1",
              file=sys.stderr)
    elif engine.auto_gain:
        print(f"auto-gain makeup: {gain_to_db(engine.makeup):+.1f} dB")

    result = np.empty((engine.out_channels, buf.length), dtype=np.float32)
    t0 = time.perf_counter()
    for start in range(0, buf.length, n):
        x = buf.samples[:, start:start + n]
        engine.process_block(x, out=result[:, start:start + x.shape[1]])
    elapsed = time.perf_counter() - t0
    if buf.length:
        print(f"real-time factor: {elapsed / (buf.length / buf.sample_rate):.4f}")

    write_wav(args.output, AudioBuffer(result, buf.sample_rate), args.format)
    print(f"wrote {args.output} ({args.format})")
    return 0


def cmd_describe(args) -> int:
    preset = preset_from_args(args)
    for line in describe_lines(preset.config, args.sample_rate):
        print(line)
    return 0


def cmd_bench(args) -> int:
    cases = default_sweep()
    if args.case:
        wanted = set(args.case)
        unknown = wanted - {c.label for c in cases}
        if unknown:
            print(f"error: case {sorted(unknown)[0]!r} not in default sweep "
                  f"({', '.join(c.label for c in cases)})", file=sys.stderr)
            return 1
        cases = [c for c in cases if c.label in wanted]
    results = run_sweep(cases, sample_rate=args.sample_rate, seconds=args.seconds,
                        time_budget=args.budget,
                        progress=lambda s: print(s, file=sys.stderr, flush=True))
    print(format_report(results, args.sample_rate), end="")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as f:
            f.write(format_csv(results, args.sample_rate))
        print(f"wrote {args.csv}", file=sys.stderr)
    return 0


def cmd_preset(args) -> int:
    if args.preset_command == "save":
        preset = preset_from_args(args)
        save_preset(args.file, preset)
        print(f"saved {args.file}")
        return 0
    preset = load_preset(args.file)
    print(serialize_preset(preset), end="")
    return 0


def cmd_serve(args) -> int:
    preset = preset_from_args(args)
    engine = _engine_from_preset(preset, args.block_size or DEFAULT_BLOCK_SIZE,
                                 args.sample_rate)
    server = BridgeServer(engine, port=args.port)
    print(f"listening on ws://{server.host}:{server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
    print("stopped")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcnfx",
        description="Randomly weighted dilated causal conv nets as audio effects")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="process a WAV file through an effect")
    p.add_argument("input", help="input WAV (16/24-bit PCM or 32-bit float)")
    p.add_argument("output", help="output WAV path")
    p.add_argument("--format", choices=WRITE_FORMATS, default="float32",
                   help="output sample format")
    _add_config_flags(p)
    _add_engine_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("describe", help="print architecture, RF, and parameter count")
    _add_config_flags(p)
    p.add_argument("--sample-rate", type=int, default=44100,
                   help="rate used to express RF in milliseconds")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("bench", help="measure real-time factors over a config sweep")
    p.add_argument("--seconds", type=float, default=DEFAULT_SECONDS,
                   help="audio seconds per case")
    p.add_argument("--budget", type=float, default=DEFAULT_TIME_BUDGET,
                   help="wall-clock seconds allowed per case")
    p.add_argument("--case", action="append", metavar="LABEL",
                   help="run only the named sweep case (repeatable)")
    p.add_argument("--csv", metavar="FILE", help="also write the report as CSV")
    p.add_argument("--sample-rate", type=int, default=44100)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("preset", help="save or load preset files")
    psub = p.add_subparsers(dest="preset_command", required=True)
    ps = psub.add_parser("save", help="write current flags as a preset file")
    ps.add_argument("file")
    _add_config_flags(ps)
    _add_engine_flags(ps)
    ps.set_defaults(func=cmd_preset)
    pl = psub.add_parser("load", help="validate and print a preset file")
    pl.add_argument("file")
    pl.set_defaults(func=cmd_preset)

    p = sub.add_parser("serve", help="serve the localhost UI bridge")
    p.add_argument("--port", type=int, default=8765,
                   help="TCP port (0 picks a free one)")
    p.add_argument("--sample-rate", type=int, default=44100)
    _add_config_flags(p)
    _add_engine_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TcnfxError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
