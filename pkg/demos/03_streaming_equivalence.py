"""
Block size does not change the audio
====================================

The look-back buffer keeps RF-1 past samples, so each block is computed
from exactly the context an offline run would see. Here the same two
seconds of noise go through one network at five block sizes and as one
offline pass; every path lands on the same samples.
"""

import numpy as np

from tcnfx import AudioBuffer, NetworkConfig, StreamEngine, build_network, forward
from tcnfx.audio import white_noise

SR = 44100
cfg = NetworkConfig(num_layers=5, kernel_size=3, dilation_growth=3,
                    channel_width=8, activation="softsign", seed=77)

x = (0.25 * white_noise(1, 2 * SR, seed=1)).astype(np.float32)

# offline reference: prepend RF-1 zeros (silence before the stream) and
# run the whole signal at once
net = build_network(cfg)
pad = np.zeros((1, net.receptive_field - 1), dtype=np.float32)
offline = forward(net, AudioBuffer(np.concatenate([pad, x], axis=1), SR)).samples
offline = np.clip(offline, -1.0, 1.0)  # the engine's safety limiter

print(f"receptive field {net.receptive_field} samples; "
      f"input {x.shape[1]} samples\n")
print("block size   max |stream - offline|")
for n in (17, 64, 512, 4096, 2 * SR):
    engine = StreamEngine(cfg, n, SR, dc_blocker=False, auto_gain=False)
    got = np.empty_like(offline)
    for start in range(0, x.shape[1], n):
        block = x[:, start:start + n]
        engine.process_block(block, out=got[:, start:start + block.shape[1]])
    print(f"{n:10d}   {np.abs(got - offline).max():.2e}")

# even a pathological partition (prime-sized ragged chunks) agrees
engine = StreamEngine(cfg, 4096, SR, dc_blocker=False, auto_gain=False)
got = np.empty_like(offline)
pos = 0
rng = np.random.default_rng(0)
while pos < x.shape[1]:
    n = min(int(rng.integers(1, 997)), x.shape[1] - pos)
    engine.process_block(x[:, pos:pos + n], out=got[:, pos:pos + n])
    pos += n
print(f"    ragged   {np.abs(got - offline).max():.2e}")
