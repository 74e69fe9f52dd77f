"""
Render a file through a random effect
=====================================

Streams a synthetic guitar-ish pluck through a random network block by
block, exactly like the realtime path, and writes the result as WAV
files next to this script.
"""

from pathlib import Path

import numpy as np

from tcnfx import AudioBuffer, NetworkConfig, StreamEngine, write_wav

SR = 44100
out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

# a plucked string: exponentially decaying harmonics with a touch of drive
t = np.arange(2 * SR) / SR
pluck = np.zeros_like(t)
for harmonic, level in ((1, 1.0), (2, 0.5), (3, 0.33), (5, 0.15)):
    pluck += level * np.sin(2 * np.pi * 110 * harmonic * t)
pluck *= np.exp(-2.2 * t)
pluck = np.tanh(1.5 * pluck) * 0.5
dry = pluck.astype(np.float32)[None, :]
write_wav(out_dir / "pluck_dry.wav", AudioBuffer(dry, SR))

# one mono-in stereo-out effect; auto-gain levels whatever the net does
cfg = NetworkConfig(num_layers=8, kernel_size=5, dilation_growth=2,
                    channel_width=8, out_channels=2, activation="tanh",
                    seed=414)
engine = StreamEngine(cfg, 512, SR, mix=0.8)
print(f"receptive field: {engine.receptive_field} samples "
      f"({engine.receptive_field / SR * 1000:.1f} ms)")
print(f"auto-gain makeup: {engine.makeup:.3f}x")

wet = np.empty((2, dry.shape[1]), dtype=np.float32)
for start in range(0, dry.shape[1], 512):
    block = dry[:, start:start + 512]
    engine.process_block(block, out=wet[:, start:start + block.shape[1]])

write_wav(out_dir / "pluck_seed414.wav", AudioBuffer(wet, SR))
print("wrote", out_dir / "pluck_dry.wav")
print("wrote", out_dir / "pluck_seed414.wav")

# the same input through three more seeds: three unrelated effects
for seed in (7, 99, 4001):
    engine = StreamEngine(NetworkConfig(seed=seed, num_layers=8, kernel_size=5,
                                        dilation_growth=2, channel_width=8,
                                        out_channels=2), 512, SR, mix=0.8)
    for start in range(0, dry.shape[1], 512):
        block = dry[:, start:start + 512]
        engine.process_block(block, out=wet[:, start:start + block.shape[1]])
    peak = float(np.abs(wet).max())
    write_wav(out_dir / f"pluck_seed{seed}.wav", AudioBuffer(wet, SR))
    print(f"wrote pluck_seed{seed}.wav (peak {peak:.3f})")
