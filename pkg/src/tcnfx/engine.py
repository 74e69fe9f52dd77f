"""Block-based real-time processing around a built network.

The engine keeps a look-back buffer of the last RF-1 input samples so a
network with receptive field RF turns every N-sample input block into
exactly N output samples: the forward pass runs over the (RF-1+N)-sample
window and the valid convolution trims it back to N. Concatenated block
outputs are sample-exact against an offline run over the zero-prepended
full signal.

Post-processing order on each block: makeup gain, DC blocker (optional),
wet/dry mix, output gain, hard clip to [-1, +1]. Input gain is applied to
the window fed to the network; the dry path stays un-gained. Network
swaps crossfade over 2048 samples with an amplitude-complementary
raised-cosine ramp, both networks reading the same history.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .audio import AudioBuffer, db_to_gain, pink_noise, rms
from .config import NetworkConfig, receptive_field
from .errors import ConfigTooLargeError, ConfigurationError, InvalidInputError
from .network import Network, Workspace, build_network, forward, forward_into

DEFAULT_BLOCK_SIZE = 512
DEFAULT_SAMPLE_RATE = 44100

# Crossfade length for network swaps, in samples.
FADE_SAMPLES = 2048

# Per-channel history + block budget: engine_new rejects configs needing more.
MEMORY_BUDGET_SAMPLES = 2**24

# Fixed seed for the auto-gain calibration noise ("PINK").
CALIBRATION_SEED = 0x50494E4B
CALIBRATION_RMS_DB = -18.0
MAKEUP_LIMIT_DB = 40.0

DC_BLOCKER_HZ = 10.0


@dataclass(frozen=True)
class CalibrationResult:
    makeup: float
    dead: bool


def calibrate_makeup(net: Network, sample_rate: int) -> CalibrationResult:
    """Measure the wet-path level and derive a makeup factor.

    One second of seeded pink noise at -18 dBFS RMS is run through the
    bare network (zero history, no gains); makeup = input RMS / wet RMS,
    clamped to +/-40 dB. A wet path that is exactly silent gets makeup 1
    and the dead flag.
    """
    cfg = net.config
    noise = pink_noise(cfg.in_channels, sample_rate, CALIBRATION_SEED,
                       rms_db=CALIBRATION_RMS_DB)
    padded = np.concatenate(
        [np.zeros((cfg.in_channels, net.receptive_field - 1), dtype=np.float32),
         noise], axis=1)
    wet = forward(net, AudioBuffer(padded, sample_rate)).samples
    wet_rms = rms(wet)
    if wet_rms == 0.0:
        return CalibrationResult(makeup=1.0, dead=True)
    limit = db_to_gain(MAKEUP_LIMIT_DB)
    makeup = min(max(rms(noise) / wet_rms, 1.0 / limit), limit)
    return CalibrationResult(makeup=makeup, dead=False)


class LookbackBuffer:
    """Last M input samples per channel plus staging for the current block.

    Layout is a flat (channels, M + block) array: history in [0, M),
    the incoming block written at [M, M+n). The window for a network
    needing m <= M past samples is the contiguous view [M-m, M+n).
    """

    def __init__(self, channels: int, past: int, block_size: int):
        self.channels = channels
        self.past = past
        self.block_size = block_size
        self.buf = np.zeros((channels, past + block_size), dtype=np.float32)

    def write(self, x: np.ndarray) -> None:
        self.buf[:, self.past:self.past + x.shape[1]] = x

    def window(self, m: int, n: int) -> np.ndarray:
        return self.buf[:, self.past - m:self.past + n]

    def advance(self, n: int) -> None:
        """Slide history left by n so [0, M) again holds the newest M inputs."""
        m = self.past
        if m == 0:
            return
        buf = self.buf
        # Chunked left shift: each chunk's source is disjoint from its
        # destination and is read before a later iteration overwrites it.
        for start in range(0, m, n):
            end = min(start + n, m)
            buf[:, start:end] = buf[:, start + n:end + n]

    def adopt_history(self, other: "LookbackBuffer") -> None:
        """Copy another (smaller or equal) buffer's history into this one."""
        m_old = other.past
        self.buf[:, :self.past - m_old] = 0.0
        if m_old:
            self.buf[:, self.past - m_old:self.past] = other.buf[:, :m_old]

    def reset(self) -> None:
        self.buf[:] = 0.0


class _Runtime:
    """A built network with the buffers its forward pass needs."""

    def __init__(self, net: Network, block_size: int, makeup: float, dead: bool,
                 input_channels: int, lookback_capacity: int):
        self.net = net
        self.past = net.receptive_field - 1
        self.makeup = makeup
        self.dead = dead
        self.ws = Workspace(net, self.past + block_size)
        self.gain_scratch = np.empty((input_channels, self.past + block_size),
                                     dtype=np.float32)
        # Preallocated replacement history when this runtime needs a longer
        # look-back than the engine currently has (adopted at a block
        # boundary; the audio thread only copies, never allocates).
        self.new_lookback = None
        if self.past > lookback_capacity:
            self.new_lookback = LookbackBuffer(input_channels, self.past, block_size)


class _DCBlocker:
    """First-order high-pass (10 Hz) removing DC the waveshapers introduce."""

    def __init__(self, channels: int, sample_rate: int):
        r = 1.0 - 2.0 * math.pi * DC_BLOCKER_HZ / sample_rate
        self._b = np.array([1.0, -1.0], dtype=np.float32)
        self._a = np.array([1.0, -r], dtype=np.float32)
        self._zi = np.zeros((channels, 1), dtype=np.float32)

    def process(self, x: np.ndarray) -> np.ndarray:
        y, self._zi = lfilter(self._b, self._a, x, axis=-1, zi=self._zi)
        return y

    def resize(self, channels: int) -> None:
        if self._zi.shape[0] != channels:
            self._zi = np.zeros((channels, 1), dtype=np.float32)

    def reset(self) -> None:
        self._zi[:] = 0.0


class StreamEngine:
    """Streams audio through a network block by block.

    The audio path (process_block, reset) expects a single caller at a
    time. swap_network may run on another thread: it builds the new
    network there and hands it to the audio path in one reference
    assignment, picked up at the next block boundary.
    """

    def __init__(self, config: NetworkConfig,
                 block_size: int = DEFAULT_BLOCK_SIZE,
                 sample_rate: int = DEFAULT_SAMPLE_RATE,
                 *,
                 input_gain_db: float = 0.0,
                 output_gain_db: float = 0.0,
                 mix: float = 1.0,
                 dc_blocker: bool = True,
                 auto_gain: bool = True,
                 memory_budget: int = MEMORY_BUDGET_SAMPLES):
        if block_size < 1:
            raise ConfigurationError(f"block_size must be >= 1, got {block_size}")
        if sample_rate <= 0:
            raise ConfigurationError(f"sample_rate must be positive, got {sample_rate}")
        self.block_size = block_size
        self.sample_rate = sample_rate
        self.in_channels = config.in_channels
        self.memory_budget = memory_budget
        self.auto_gain = auto_gain
        self.input_gain_db = input_gain_db
        self.output_gain_db = output_gain_db
        self.mix = mix
        self.dc_enabled = dc_blocker

        self._lock = threading.Lock()
        self._pending: _Runtime | None = None
        self._queued: _Runtime | None = None
        self._fading_out: _Runtime | None = None
        self._fade_pos = 0

        self._lookback = LookbackBuffer(config.in_channels, 0, block_size)
        self._active = self._build_runtime(config)
        if self._active.new_lookback is not None:
            self._lookback = self._active.new_lookback
            self._active.new_lookback = None
        self._dc = _DCBlocker(config.out_channels, sample_rate)

        # Raised-cosine fade-in gains; the fade-out side is the complement,
        # so crossfading a signal with itself is the identity. A block
        # larger than the nominal fade stretches the fade to one block.
        self._fade_len = max(FADE_SAMPLES, block_size)
        ramp = np.arange(1, self._fade_len + 1, dtype=np.float64) / self._fade_len
        self._fade_curve = np.square(np.sin(0.5 * math.pi * ramp)).astype(np.float32)

        n = block_size
        self._wet = np.empty((2, n), dtype=np.float32)
        self._wet_old = np.empty((2, n), dtype=np.float32)
        self._dry = np.empty((2, n), dtype=np.float32)
        self._env_new = np.empty(n, dtype=np.float32)
        self._env_old = np.empty(n, dtype=np.float32)
        self._finite = np.empty((2, n), dtype=bool)

    # -- construction helpers -------------------------------------------------

    def _check_budget(self, config: NetworkConfig) -> int:
        rf = receptive_field(config)
        if rf - 1 + self.block_size > self.memory_budget:
            raise ConfigTooLargeError(
                f"history of {rf - 1} + block of {self.block_size} samples "
                f"exceeds the {self.memory_budget}-sample budget")
        return rf

    def _build_runtime(self, config: NetworkConfig) -> _Runtime:
        self._check_budget(config)
        net = build_network(config)
        if self.auto_gain:
            cal = calibrate_makeup(net, self.sample_rate)
        else:
            cal = CalibrationResult(makeup=1.0, dead=False)
        return _Runtime(net, self.block_size, cal.makeup, cal.dead,
                        self.in_channels, self._lookback.past)

    # -- public state ---------------------------------------------------------

    @property
    def config(self) -> NetworkConfig:
        return self._active.net.config

    @property
    def network(self) -> Network:
        return self._active.net

    @property
    def receptive_field(self) -> int:
        return self._active.net.receptive_field

    @property
    def out_channels(self) -> int:
        return self._active.net.config.out_channels

    @property
    def makeup(self) -> float:
        return self._active.makeup

    @property
    def dead_network(self) -> bool:
        return self._active.dead

    # -- control path ---------------------------------------------------------

    def swap_network(self, new_config: NetworkConfig) -> CalibrationResult:
        """Build a replacement network and schedule a crossfade to it.

        Safe to call from a non-audio thread; the build happens here, off
        the audio path. A swap requested while a fade is running is queued
        (one deep, newest wins) and starts when the fade completes. On
        error the engine keeps the current network. Returns the new
        network's calibration so callers can surface the dead flag.
        """
        if new_config.in_channels != self.in_channels:
            raise ConfigurationError(
                f"in_channels must stay {self.in_channels} while streaming, "
                f"got {new_config.in_channels}")
        rt = self._build_runtime(new_config)
        with self._lock:
            if self._fading_out is not None:
                self._queued = rt
            else:
                self._pending = rt
        return CalibrationResult(makeup=rt.makeup, dead=rt.dead)

    def set_gains(self, input_gain_db: float | None = None,
                  output_gain_db: float | None = None,
                  mix: float | None = None,
                  dc_blocker: bool | None = None) -> None:
        if input_gain_db is not None:
            self.input_gain_db = input_gain_db
        if output_gain_db is not None:
            self.output_gain_db = output_gain_db
        if mix is not None:
            if not 0.0 <= mix <= 1.0:
                raise ConfigurationError(f"mix must be in [0, 1], got {mix}")
            self.mix = mix
        if dc_blocker is not None:
            self.dc_enabled = dc_blocker

    def reset(self) -> None:
        """Zero history and cancel any crossfade; gain settings persist.

        A pending swap is finalized immediately (the newest requested
        network becomes active), so after reset the engine behaves like a
        freshly constructed one.
        """
        with self._lock:
            target = self._queued or self._pending
            if self._fading_out is not None and self._pending is None and self._queued is None:
                pass  # mid-fade: the fade target is already active
            elif target is not None:
                self._adopt(target)
            self._pending = None
            self._queued = None
            self._fading_out = None
            self._fade_pos = self._fade_len
        self._lookback.reset()
        self._dc.reset()

    # -- audio path -----------------------------------------------------------

    def _adopt(self, rt: _Runtime) -> None:
        if rt.new_lookback is not None and rt.new_lookback.past > self._lookback.past:
            rt.new_lookback.adopt_history(self._lookback)
            self._lookback = rt.new_lookback
        rt.new_lookback = None
        self._active = rt
        self._dc.resize(rt.net.config.out_channels)

    def _wet_path(self, rt: _Runtime, n: int, gain_in: float) -> np.ndarray:
        window = self._lookback.window(rt.past, n)
        if gain_in != 1.0:
            scaled = rt.gain_scratch[:, :rt.past + n]
            np.multiply(window, np.float32(gain_in), out=scaled)
            window = scaled
        return forward_into(rt.net, window, rt.ws)

    def _match_channels(self, wet: np.ndarray, channels: int,
                        scratch: np.ndarray) -> np.ndarray:
        if wet.shape[0] == channels:
            return wet
        n = wet.shape[1]
        out = scratch[:channels, :n]
        if wet.shape[0] == 1:
            np.copyto(out, wet)          # mono -> duplicated
        else:
            np.mean(wet, axis=0, out=out[0])  # stereo -> mid
            if channels == 2:
                out[1] = out[0]
        return out

    def process_block(self, block, out: np.ndarray | None = None) -> AudioBuffer:
        """Turn an n-sample input block into exactly n output samples.

        `block` is an AudioBuffer or a (channels, n) float32 array with
        n <= block_size (a short final block is fine). Passing `out`, a
        (out_channels, >= n) float32 array, makes the steady-state audio
        path allocation-free.
        """
        if isinstance(block, AudioBuffer):
            if block.sample_rate != self.sample_rate:
                raise InvalidInputError(
                    f"block sample rate {block.sample_rate} != engine rate "
                    f"{self.sample_rate}")
            x = block.samples
        else:
            x = block
            if x.ndim != 2 or x.dtype != np.float32:
                raise InvalidInputError("block must be a 2-D float32 array")
        if x.shape[0] != self.in_channels:
            raise InvalidInputError(
                f"block has {x.shape[0]} channels, engine expects {self.in_channels}")
        n = x.shape[1]
        if not 1 <= n <= self.block_size:
            raise InvalidInputError(
                f"block length {n} not in [1, {self.block_size}]")
        if not isinstance(block, AudioBuffer):
            fin = self._finite[:x.shape[0], :n]
            np.isfinite(x, out=fin)
            if not fin.all():
                raise InvalidInputError("block contains NaN or Inf")

        with self._lock:
            if self._pending is not None:
                if self._active is not None:
                    self._fading_out = self._active
                    self._fade_pos = 0
                self._adopt(self._pending)
                self._pending = None

        lb = self._lookback
        lb.write(x)
        gain_in = db_to_gain(self.input_gain_db)
        active = self._active
        out_ch = active.net.config.out_channels

        wet_new = self._wet_path(active, n, gain_in)
        wet = self._wet[:out_ch, :n]
        if self._fading_out is not None:
            wet_old = self._wet_path(self._fading_out, n, gain_in)
            wet_old = self._match_channels(wet_old, out_ch, self._wet_old)
            env_new = self._env_new[:n]
            env_old = self._env_old[:n]
            pos = self._fade_pos
            nf = max(0, min(n, self._fade_len - pos))
            env_new[:nf] = self._fade_curve[pos:pos + nf]
            env_new[nf:] = 1.0
            np.subtract(np.float32(1.0), env_new, out=env_old)
            env_new *= np.float32(active.makeup)
            env_old *= np.float32(self._fading_out.makeup)
            np.multiply(wet_new, env_new, out=wet)
            wet_old = np.multiply(wet_old, env_old, out=self._wet_old[:out_ch, :n])
            wet += wet_old
            self._fade_pos = pos + n
            if self._fade_pos >= self._fade_len:
                self._fading_out = None
                with self._lock:
                    if self._queued is not None:
                        self._pending = self._queued
                        self._queued = None
        else:
            np.multiply(wet_new, np.float32(active.makeup), out=wet)

        if self.dc_enabled:
            wet = self._dc.process(wet)

        if out is None:
            o = np.empty((out_ch, n), dtype=np.float32)
        else:
            o = out[:out_ch, :n]
        mix = self.mix
        gain_out = db_to_gain(self.output_gain_db)
        if mix >= 1.0:
            np.multiply(wet, np.float32(gain_out), out=o)
        else:
            dry = self._match_channels(x, out_ch, self._dry)
            np.multiply(wet, np.float32(mix), out=o)
            dry_scaled = np.multiply(dry, np.float32(1.0 - mix),
                                     out=self._dry[:out_ch, :n])
            o += dry_scaled
            o *= np.float32(gain_out)
        np.clip(o, -1.0, 1.0, out=o)

        lb.advance(n)
        return AudioBuffer(o, self.sample_rate)
