"""Audio buffer contract and the deterministic noise generators."""

import numpy as np
import pytest

from tcnfx.audio import (
    AudioBuffer,
    db_to_gain,
    gain_to_db,
    pink_noise,
    rms,
    white_noise,
)
from tcnfx.errors import InvalidInputError


def test_buffer_validates_shape_dtype_finiteness():
    AudioBuffer(np.zeros((2, 4), np.float32), 44100)
    with pytest.raises(InvalidInputError):
        AudioBuffer(np.zeros(4, np.float32), 44100)
    with pytest.raises(InvalidInputError):
        AudioBuffer(np.zeros((1, 4), np.float64), 44100)
    with pytest.raises(InvalidInputError):
        AudioBuffer(np.zeros((1, 4), np.float32), 0)
    bad = np.zeros((1, 4), np.float32)
    bad[0, 1] = np.inf
    with pytest.raises(InvalidInputError):
        AudioBuffer(bad, 44100)


def test_buffer_properties():
    buf = AudioBuffer.zeros(2, 100, 48000)
    assert (buf.channels, buf.length, buf.sample_rate) == (2, 100, 48000)


def test_db_conversions_round_trip():
    assert db_to_gain(0.0) == 1.0
    assert db_to_gain(20.0) == pytest.approx(10.0)
    assert gain_to_db(0.5) == pytest.approx(-6.0206, abs=1e-3)
    for db in (-40.0, -6.0, 0.0, 12.0):
        assert gain_to_db(db_to_gain(db)) == pytest.approx(db, abs=1e-12)


def test_rms_pins():
    assert rms(np.ones((1, 8), np.float32)) == 1.0
    assert rms(np.array([[3.0, 4.0]], np.float32)) == pytest.approx(np.sqrt(12.5))
    t = np.arange(44100) / 44100
    sine = np.sin(2 * np.pi * 100 * t)[None, :].astype(np.float32)
    assert rms(sine) == pytest.approx(1 / np.sqrt(2), rel=1e-4)


def test_white_noise_is_seeded_and_channel_independent():
    a = white_noise(2, 4096, seed=1)
    assert np.array_equal(a, white_noise(2, 4096, seed=1))
    assert not np.array_equal(a[0], a[1])
    assert not np.array_equal(a, white_noise(2, 4096, seed=2))
    # channel streams are keyed, not split: ch1 of a 2ch request equals
    # ch1 of a wider request
    b = white_noise(3, 4096, seed=1)
    assert np.array_equal(a, b[:2])
    assert a.dtype == np.float32
    assert abs(float(a.std()) - 1.0) < 0.05


def test_pink_noise_rms_and_determinism():
    x = pink_noise(1, 44100, seed=5)
    assert np.array_equal(x, pink_noise(1, 44100, seed=5))
    assert gain_to_db(rms(x)) == pytest.approx(-18.0, abs=1e-3)
    loud = pink_noise(1, 44100, seed=5, rms_db=-6.0)
    assert gain_to_db(rms(loud)) == pytest.approx(-6.0, abs=1e-3)


def test_pink_noise_slope_is_minus_3db_per_octave():
    x = pink_noise(1, 2**16, seed=7).astype(np.float64)
    spec = np.abs(np.fft.rfft(x[0])) ** 2
    freqs = np.fft.rfftfreq(2**16, 1 / 44100)

    def band_power(lo, hi):
        sel = (freqs >= lo) & (freqs < hi)
        return spec[sel].sum()

    # equal power per octave is the pink signature
    octaves = [(125, 250), (250, 500), (500, 1000), (1000, 2000), (2000, 4000)]
    powers = [band_power(*o) for o in octaves]
    for p in powers[1:]:
        assert p == pytest.approx(powers[0], rel=0.25)


def test_pink_noise_has_no_dc():
    x = pink_noise(1, 8192, seed=3)
    assert abs(float(x.mean())) < 1e-4
