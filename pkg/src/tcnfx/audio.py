"""Multichannel sample blocks and small signal utilities.

All audio in the package is planar float32: shape (channels, length).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass
class AudioBuffer:
    """A block of planar float32 samples with a sample rate.

    Values must be finite on every public boundary; the constructor
    enforces dtype/shape and rejects NaN/Inf.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        s = self.samples
        if not isinstance(s, np.ndarray) or s.ndim != 2:
            raise InvalidInputError("samples must be a 2-D (channels, length) array")
        if s.dtype != np.float32:
            raise InvalidInputError(f"samples must be float32, got {s.dtype}")
        if self.sample_rate <= 0:
            raise InvalidInputError(f"sample_rate must be positive, got {self.sample_rate}")
        if s.size and not np.all(np.isfinite(s)):
            raise InvalidInputError("samples contain NaN or Inf")

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def length(self) -> int:
        return self.samples.shape[1]

    @classmethod
    def zeros(cls, channels: int, length: int, sample_rate: int) -> "AudioBuffer":
        return cls(np.zeros((channels, length), dtype=np.float32), sample_rate)


def db_to_gain(db: float) -> float:
    return 10.0 ** (db / 20.0)


def gain_to_db(gain: float) -> float:
    return 20.0 * np.log10(gain)


def rms(x: np.ndarray) -> float:
    """Root-mean-square over all channels and samples."""
    return float(np.sqrt(np.mean(np.square(x, dtype=np.float64))))


def white_noise(channels: int, length: int, seed: int) -> np.ndarray:
    """Deterministic unit-variance white noise, one Philox stream per channel."""
    out = np.empty((channels, length), dtype=np.float32)
    for ch in range(channels):
        gen = np.random.Generator(np.random.Philox(key=np.array([seed, ch], dtype=np.uint64)))
        out[ch] = gen.standard_normal(length, dtype=np.float32)
    return out


def pink_noise(channels: int, length: int, seed: int, rms_db: float = -18.0) -> np.ndarray:
    """Deterministic pink (1/f power) noise normalized to the given RMS in dBFS.

    Spectral shaping of seeded white noise: each rFFT bin is scaled by
    1/sqrt(f) and the DC bin zeroed, giving the -3 dB/octave slope.
    """
    white = white_noise(channels, length, seed).astype(np.float64)
    spectrum = np.fft.rfft(white, axis=-1)
    bins = np.arange(spectrum.shape[-1], dtype=np.float64)
    bins[0] = 1.0
    spectrum /= np.sqrt(bins)
    spectrum[:, 0] = 0.0
    shaped = np.fft.irfft(spectrum, n=length, axis=-1)
    shaped *= db_to_gain(rms_db) / max(rms(shaped), 1e-30)
    return shaped.astype(np.float32)
