"""Deterministic builds, convolution semantics, and the forward pass.

The convolution oracle here is a naive float64 triple loop, independent
of the GEMM/slice kernels the package actually uses.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tcnfx.audio import AudioBuffer, white_noise
from tcnfx.config import NetworkConfig, derive_layer_plan
from tcnfx.errors import InsufficientContextError, InvalidInputError
from tcnfx.network import (
    Network,
    NetworkLayer,
    Workspace,
    apply_activation,
    build_network,
    conv1d_causal,
    forward,
    forward_into,
)
from tcnfx import kernels


def naive_conv(x, w, dilation, bias=None, depthwise=False):
    """Reference valid correlation, float64, straight from the definition."""
    out_ch, _, k = w.shape
    n = x.shape[1] - (k - 1) * dilation
    y = np.zeros((out_ch, n), dtype=np.float64)
    for oc in range(out_ch):
        ics = [oc] if depthwise else range(x.shape[0])
        for wi, ic in enumerate(ics):
            for i in range(k):
                y[oc] += w[oc, wi if not depthwise else 0, i] * \
                    x[ic, i * dilation:i * dilation + n]
    if bias is not None:
        y += bias[:, None]
    return y


def test_build_is_deterministic():
    cfg = NetworkConfig(num_layers=4, kernel_size=5, channel_width=8,
                        use_bias=True, seed=123)
    a = build_network(cfg)
    b = build_network(cfg)
    for la, lb in zip(a.layers, b.layers):
        assert la.weights.tobytes() == lb.weights.tobytes()
        assert la.bias.tobytes() == lb.bias.tobytes()


def test_seed_changes_weights_but_not_shapes():
    a = build_network(NetworkConfig(seed=1))
    b = build_network(NetworkConfig(seed=2))
    assert a.receptive_field == b.receptive_field
    diffs = 0
    for la, lb in zip(a.layers, b.layers):
        assert la.weights.shape == lb.weights.shape
        diffs += int(not np.array_equal(la.weights, lb.weights))
    assert diffs > 0


def test_layers_draw_independent_streams():
    net = build_network(NetworkConfig(num_layers=3, channel_width=8, seed=9))
    w1 = net.layers[1].weights
    w2 = net.layers[2].weights
    assert not np.array_equal(w1, w2)


def test_network_is_immutable():
    net = build_network(NetworkConfig())
    with pytest.raises(ValueError):
        net.layers[0].weights[0, 0, 0] = 1.0


def test_glorot_uniform_respects_fan_bound():
    cfg = NetworkConfig(num_layers=3, kernel_size=5, channel_width=16,
                        init_scheme="glorot_uniform", seed=11)
    net = build_network(cfg)
    for layer in net.layers:
        fan_in = layer.spec.in_ch * layer.spec.kernel_size
        fan_out = layer.spec.out_ch * layer.spec.kernel_size
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        assert np.abs(layer.weights).max() <= bound * (1 + 1e-6)


def test_he_normal_scale_tracks_fan_in():
    cfg = NetworkConfig(num_layers=2, kernel_size=8, channel_width=64,
                        init_scheme="he_normal", seed=3)
    net = build_network(cfg)
    layer = net.layers[1]
    sigma = math.sqrt(2.0 / (layer.spec.in_ch * layer.spec.kernel_size))
    assert abs(float(layer.weights.std()) - sigma) < 0.2 * sigma


def test_normal_default_sigma():
    net = build_network(NetworkConfig(num_layers=2, kernel_size=32,
                                      channel_width=64, seed=5))
    w = net.layers[1].weights  # 64x64x32 draws, plenty for a tight std
    assert abs(float(w.std()) - 0.4) < 0.05


def test_uniform_half_width_bound():
    net = build_network(NetworkConfig(init_scheme="uniform", init_param=0.25, seed=8))
    for layer in net.layers:
        assert np.abs(layer.weights).max() <= 0.25 * (1 + 1e-6)


def test_bias_range():
    net = build_network(NetworkConfig(num_layers=4, channel_width=32,
                                      use_bias=True, seed=21))
    for layer in net.layers:
        assert layer.bias.shape == (layer.spec.out_ch,)
        assert np.abs(layer.bias).max() <= 0.1


def test_depthwise_weight_shapes():
    net = build_network(NetworkConfig(num_layers=4, channel_width=8, depthwise=True))
    shapes = [l.weights.shape for l in net.layers]
    assert shapes == [(8, 1, 3), (8, 1, 3), (8, 1, 3), (1, 8, 3)]


# -- conv1d_causal ------------------------------------------------------------

def test_conv_pinned_example():
    x = np.array([[1, 2, 3, 4]], dtype=np.float32)
    w = np.array([[[1, 1]]], dtype=np.float32)
    out = conv1d_causal(x, w, dilation=1)
    assert np.array_equal(out, [[3, 5, 7]])


def test_conv_kernel_size_one_is_identity():
    x = white_noise(1, 50, seed=1)
    w = np.array([[[1.0]]], dtype=np.float32)
    for d in (1, 2, 7):
        assert np.array_equal(conv1d_causal(x, w, dilation=d), x)


def test_conv_dilated_tap_order():
    # oldest-first taps: w[0] multiplies the oldest sample
    x = np.array([[1, 0, 0, 0, 0]], dtype=np.float32)
    w = np.array([[[1.0, 0.5]]], dtype=np.float32)
    out = conv1d_causal(x, w, dilation=2)
    assert np.array_equal(out, [[1, 0, 0]])


def test_conv_impulse_response_delays():
    """w=[1, 0.5], d=2 responds at delays {0, 2} after the impulse."""
    x = np.zeros((1, 64), dtype=np.float32)
    t0 = 30
    x[0, t0] = 1.0
    w = np.array([[[1.0, 0.5]]], dtype=np.float32)
    out = conv1d_causal(x, w, dilation=2)[0]
    span = 2  # (k-1)*d: output j is aligned to input time j+span
    times = {j + span - t0 for j in np.nonzero(out)[0]}
    assert times == {0, 2}
    assert out[t0 - span] == 0.5  # the newest-tap hit comes first
    assert out[t0] == 1.0


def test_conv_insufficient_context():
    x = np.zeros((1, 4), dtype=np.float32)
    w = np.ones((1, 1, 3), dtype=np.float32)
    with pytest.raises(InsufficientContextError):
        conv1d_causal(x, w, dilation=2)  # span 5 > length 4


@given(
    in_ch=st.integers(1, 5),
    out_ch=st.integers(1, 5),
    k=st.integers(1, 6),
    d=st.integers(1, 5),
    extra=st.integers(0, 40),
    seed=st.integers(0, 2**16),
)
@settings(max_examples=120, deadline=None)
def test_conv_dense_matches_naive_oracle(in_ch, out_ch, k, d, extra, seed):
    rng = np.random.default_rng(seed)
    n = (k - 1) * d + 1 + extra
    x = rng.standard_normal((in_ch, n), dtype=np.float32)
    w = rng.standard_normal((out_ch, in_ch, k), dtype=np.float32)
    b = rng.standard_normal(out_ch, dtype=np.float32)
    got = conv1d_causal(x, w, d, bias=b)
    want = naive_conv(x.astype(np.float64), w, d, bias=b)
    assert got.shape == want.shape
    np.testing.assert_allclose(got, want, rtol=2e-5, atol=1e-5)


@given(
    ch=st.integers(1, 8),
    k=st.integers(1, 6),
    d=st.integers(1, 4),
    extra=st.integers(0, 30),
    seed=st.integers(0, 2**16),
)
@settings(max_examples=80, deadline=None)
def test_conv_depthwise_matches_naive_oracle(ch, k, d, extra, seed):
    rng = np.random.default_rng(seed)
    n = (k - 1) * d + 1 + extra
    x = rng.standard_normal((ch, n), dtype=np.float32)
    w = rng.standard_normal((ch, 1, k), dtype=np.float32)
    got = conv1d_causal(x, w, d, depthwise=True)
    want = naive_conv(x.astype(np.float64), w, d, depthwise=True)
    np.testing.assert_allclose(got, want, rtol=2e-5, atol=1e-5)


def test_depthwise_equals_dense_with_diagonal_weights():
    """A depthwise layer is a dense layer whose mixing matrix is diagonal."""
    rng = np.random.default_rng(0)
    ch, k, d = 6, 3, 2
    x = rng.standard_normal((ch, 40), dtype=np.float32)
    w_dw = rng.standard_normal((ch, 1, k), dtype=np.float32)
    w_dense = np.zeros((ch, ch, k), dtype=np.float32)
    for c in range(ch):
        w_dense[c, c] = w_dw[c, 0]
    got = conv1d_causal(x, w_dw, d, depthwise=True)
    want = conv1d_causal(x, w_dense, d)
    np.testing.assert_allclose(got, want, rtol=1e-6, atol=1e-7)


def test_numpy_and_numba_depthwise_agree_bitwise():
    if kernels.backend_name() != "numba":
        pytest.skip("numba backend not active")
    rng = np.random.default_rng(4)
    x = rng.standard_normal((8, 200), dtype=np.float32)
    w = rng.standard_normal((8, 1, 5), dtype=np.float32)
    fast = kernels.conv_depthwise(x, w, 3)
    slow = kernels.conv_depthwise_numpy(x, w, 3)
    assert np.array_equal(fast, slow)


# -- activations --------------------------------------------------------------

def test_activation_pinned_values():
    x = np.array([[-1.0, 0.0, 2.0]], dtype=np.float32)
    assert np.array_equal(apply_activation("relu", x), [[0, 0, 2]])
    assert apply_activation("sigmoid", x)[0, 1] == 0.5
    assert apply_activation("tanh", x)[0, 1] == 0.0
    assert apply_activation("linear", x)[0, 0] == -1.0
    assert np.isclose(apply_activation("leaky_relu", x)[0, 0], -0.2)
    assert np.isclose(apply_activation("softsign", x)[0, 2], 2.0 / 3.0)


def test_activations_preserve_dtype_and_finiteness():
    x = (white_noise(2, 256, seed=6) * 50).astype(np.float32)
    for name in ("linear", "relu", "tanh", "sigmoid", "softsign", "leaky_relu"):
        y = apply_activation(name, x)
        assert y.dtype == np.float32
        assert np.isfinite(y).all()


def test_sigmoid_saturates_cleanly_at_extremes():
    x = np.array([[-1e4, 1e4]], dtype=np.float32)
    y = apply_activation("sigmoid", x)
    assert np.array_equal(y, [[0.0, 1.0]])


# -- forward ------------------------------------------------------------------

def identity_network() -> Network:
    """One 1-tap linear layer with its weight forced to exactly 1."""
    net = build_network(NetworkConfig(num_layers=1, kernel_size=1,
                                      channel_width=1, activation="linear"))
    w = np.ones((1, 1, 1), dtype=np.float32)
    w.flags.writeable = False
    layer = net.layers[0]
    new_layer = NetworkLayer(layer.spec, w, None, kernels.gemm_weights(w))
    return Network(net.config, (new_layer,), net.receptive_field)


def test_forward_identity_network():
    buf = AudioBuffer(white_noise(1, 300, seed=2), 44100)
    out = forward(identity_network(), buf)
    assert np.array_equal(out.samples, buf.samples)
    assert out.sample_rate == 44100


def test_forward_length_arithmetic():
    cfg = NetworkConfig(num_layers=3, kernel_size=3, dilation_growth=2)
    net = build_network(cfg)
    rf = net.receptive_field
    out = forward(net, AudioBuffer(white_noise(1, rf, seed=1), 48000))
    assert out.length == 1
    out = forward(net, AudioBuffer(white_noise(1, rf + 99, seed=1), 48000))
    assert out.length == 100


@given(
    L=st.integers(1, 4),
    k=st.integers(1, 5),
    g=st.integers(1, 3),
    c=st.integers(1, 6),
    i=st.integers(1, 2),
    o=st.integers(1, 2),
    act=st.sampled_from(["linear", "relu", "tanh", "sigmoid", "softsign",
                         "leaky_relu"]),
    dw=st.booleans(),
    seed=st.integers(0, 2**32),
)
@settings(max_examples=60, deadline=None)
def test_forward_output_shape_property(L, k, g, c, i, o, act, dw, seed):
    cfg = NetworkConfig(num_layers=L, kernel_size=k, dilation_growth=g,
                        channel_width=c, in_channels=i, out_channels=o,
                        activation=act, depthwise=dw, seed=seed)
    net = build_network(cfg)
    n = net.receptive_field + 37
    out = forward(net, AudioBuffer(white_noise(i, n, seed=seed & 0xFF), 44100))
    assert out.channels == o
    assert out.length == 38
    assert np.isfinite(out.samples).all()


def test_forward_validates_input():
    net = build_network(NetworkConfig())
    rf = net.receptive_field
    with pytest.raises(InvalidInputError):
        forward(net, AudioBuffer(white_noise(2, rf + 10, seed=1), 44100))
    with pytest.raises(InsufficientContextError):
        forward(net, AudioBuffer(white_noise(1, rf - 1, seed=1), 44100))
    buf = AudioBuffer(np.zeros((1, rf + 4), np.float32), 44100)
    buf.samples[0, 2] = np.inf  # mutated after construction
    with pytest.raises(InvalidInputError):
        forward(net, buf)


def test_forward_into_matches_forward():
    cfg = NetworkConfig(num_layers=3, kernel_size=4, channel_width=6,
                        activation="softsign", use_bias=True, seed=77)
    net = build_network(cfg)
    x = white_noise(1, net.receptive_field + 200, seed=9)
    want = forward(net, AudioBuffer(x, 44100)).samples
    ws = Workspace(net, x.shape[1])
    got = forward_into(net, x, ws)
    assert np.array_equal(got, want)
    # reusing the workspace must not change results
    got2 = forward_into(net, x, ws)
    assert np.array_equal(got2, want)


def test_forward_linearity_quick():
    cfg = NetworkConfig(num_layers=3, kernel_size=3, channel_width=8,
                        activation="linear", seed=31)
    net = build_network(cfg)
    rf = net.receptive_field
    x = white_noise(1, rf + 500, seed=1)
    y = white_noise(1, rf + 500, seed=2)
    a, b = np.float32(0.7), np.float32(-1.3)
    lhs = forward(net, AudioBuffer(a * x + b * y, 44100)).samples
    rhs = a * forward(net, AudioBuffer(x, 44100)).samples + \
        b * forward(net, AudioBuffer(y, 44100)).samples
    denom = max(float(np.abs(rhs).max()), 1e-9)
    assert float(np.abs(lhs - rhs).max()) / denom < 1e-5
