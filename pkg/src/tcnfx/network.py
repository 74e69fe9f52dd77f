"""Deterministic construction and evaluation of randomly weighted networks.

Weights come from numpy's Philox counter-based generator, keyed by
(seed, layer_index, tensor role), so a config builds the same network on
every run: the seed is the preset. Evaluation is a chain of valid
(unpadded) dilated correlations and waveshaping activations; output
sample t depends only on input samples in [t - RF + 1, t].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .audio import AudioBuffer
from .config import (
    LEAKY_RELU_SLOPE,
    LayerSpec,
    NetworkConfig,
    derive_layer_plan,
    receptive_field,
)
from .errors import InsufficientContextError, InvalidInputError

_ROLE_WEIGHT = 0
_ROLE_BIAS = 1

# Biases, when enabled, are drawn uniformly from this interval.
_BIAS_HALF_WIDTH = 0.1


def _stream(seed: int, layer_index: int, role: int) -> np.random.Generator:
    """One independent Philox stream per (seed, layer, tensor role)."""
    key = np.array([seed, (layer_index << 8) | role], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _fans(spec: LayerSpec) -> tuple[int, int]:
    # Depthwise filters each see a single channel.
    if spec.depthwise:
        return spec.kernel_size, spec.kernel_size
    return spec.in_ch * spec.kernel_size, spec.out_ch * spec.kernel_size


def _draw_weights(spec: LayerSpec, scheme: str, param: float,
                  gen: np.random.Generator) -> np.ndarray:
    shape = spec.weight_shape
    fan_in, fan_out = _fans(spec)
    if scheme == "normal":
        return gen.standard_normal(shape, dtype=np.float32) * np.float32(param)
    if scheme == "he_normal":
        sigma = math.sqrt(2.0 / fan_in)
        return gen.standard_normal(shape, dtype=np.float32) * np.float32(sigma)
    if scheme == "uniform":
        half = param
    else:  # glorot_uniform
        half = math.sqrt(6.0 / (fan_in + fan_out))
    r = gen.random(shape, dtype=np.float32)
    r *= np.float32(2.0 * half)
    r -= np.float32(half)
    return r


@dataclass(frozen=True)
class NetworkLayer:
    spec: LayerSpec
    weights: np.ndarray          # (out_ch, in_ch, k) dense, (ch, 1, k) depthwise
    bias: np.ndarray | None      # (out_ch,) or None
    gemm_w: np.ndarray | None    # cached tap-major matrix for dense layers


@dataclass(frozen=True)
class Network:
    """An immutable built instance: specs plus concrete weight tensors."""

    config: NetworkConfig
    layers: tuple[NetworkLayer, ...]
    receptive_field: int


def build_network(config: NetworkConfig) -> Network:
    """Construct the network a config describes. Pure function of the config."""
    rf = receptive_field(config)
    param = config.resolved_init_param()
    layers = []
    for spec in derive_layer_plan(config):
        w = _draw_weights(spec, config.init_scheme, param,
                          _stream(config.seed, spec.layer_index, _ROLE_WEIGHT))
        w.flags.writeable = False
        b = None
        if spec.bias:
            gen = _stream(config.seed, spec.layer_index, _ROLE_BIAS)
            b = gen.random(spec.out_ch, dtype=np.float32)
            b *= np.float32(2.0 * _BIAS_HALF_WIDTH)
            b -= np.float32(_BIAS_HALF_WIDTH)
            b.flags.writeable = False
        gw = None
        if not spec.depthwise:
            gw = kernels.gemm_weights(w)
            gw.flags.writeable = False
        layers.append(NetworkLayer(spec, w, b, gw))
    return Network(config, tuple(layers), rf)


def conv1d_causal(x: np.ndarray, weights: np.ndarray, dilation: int,
                  bias: np.ndarray | None = None,
                  depthwise: bool = False) -> np.ndarray:
    """Valid dilated cross-correlation over channel rows, taps oldest-first.

    out[oc, t] = bias[oc] + sum_ic sum_i w[oc, ic, i] * x[ic, t + i*dilation]

    Output sample j therefore depends only on input samples
    j .. j + (k-1)*dilation, and the output is shorter than the input by
    (k-1)*dilation samples.
    """
    k = weights.shape[2]
    span = (k - 1) * dilation + 1
    if x.shape[1] < span:
        raise InsufficientContextError(
            f"input length {x.shape[1]} is shorter than the kernel span {span}")
    if depthwise:
        out = kernels.conv_depthwise(x, weights, dilation)
    else:
        out = kernels.conv_dense(x, weights, dilation)
    if bias is not None:
        out += bias[:, None]
    return out


def apply_activation(activation: str, x: np.ndarray,
                     out: np.ndarray | None = None,
                     tmp: np.ndarray | None = None) -> np.ndarray:
    """Elementwise waveshaper. With out=x the operation is in place.

    The op sequence is fixed per activation so allocating and in-place
    calls produce bit-identical float32 results.
    """
    if out is None:
        out = np.empty_like(x)
    if activation == "linear":
        if out is not x:
            np.copyto(out, x)
        return out
    if activation == "relu":
        return np.maximum(x, np.float32(0.0), out=out)
    if activation == "tanh":
        return np.tanh(x, out=out)
    if activation == "sigmoid":
        # 0.5 * (1 + tanh(x/2)): overflow-free and exact at 0.
        np.multiply(x, np.float32(0.5), out=out)
        np.tanh(out, out=out)
        out += np.float32(1.0)
        out *= np.float32(0.5)
        return out
    if tmp is None:
        tmp = np.empty_like(x)
    t = tmp[: x.shape[0], : x.shape[1]]
    if activation == "softsign":
        np.abs(x, out=t)
        t += np.float32(1.0)
        return np.divide(x, t, out=out)
    if activation == "leaky_relu":
        # max(x, slope*x) equals leaky relu for slope < 1.
        np.multiply(x, np.float32(LEAKY_RELU_SLOPE), out=t)
        return np.maximum(x, t, out=out)
    raise ValueError(f"unknown activation {activation!r}")


class Workspace:
    """Preallocated per-layer buffers for repeated forward passes.

    Sized for a maximum input length; forward_into slices views for
    shorter windows, so the streaming engine allocates nothing per block.
    """

    def __init__(self, net: Network, max_input_len: int):
        self.max_input_len = max_input_len
        self.acc = []
        self.tmp = []
        self.cols = []
        n = max_input_len
        for layer in net.layers:
            spec = layer.spec
            n = kernels.out_length(n, spec.kernel_size, spec.dilation)
            if n < 1:
                raise InsufficientContextError(
                    f"input of {max_input_len} samples is consumed before layer "
                    f"{spec.layer_index}; receptive field is {net.receptive_field}")
            self.acc.append(np.empty((spec.out_ch, n), dtype=np.float32))
            self.tmp.append(np.empty((spec.out_ch, n), dtype=np.float32))
            if spec.depthwise:
                self.cols.append(None)
            else:
                self.cols.append(np.empty((spec.in_ch * spec.kernel_size, n),
                                          dtype=np.float32))


def forward_into(net: Network, x: np.ndarray, ws: Workspace) -> np.ndarray:
    """Run the network over (in_ch, T) samples using workspace buffers.

    Returns a view into the workspace of shape (out_ch, T - RF + 1);
    callers must copy it out before the next call. No length or finiteness
    validation here -- the engine audio path validates incoming blocks.
    """
    cur = x
    for i, layer in enumerate(net.layers):
        spec = layer.spec
        n = kernels.out_length(cur.shape[1], spec.kernel_size, spec.dilation)
        out = ws.acc[i][:, :n]
        tmp = ws.tmp[i]
        if spec.depthwise:
            kernels.conv_depthwise(cur, layer.weights, spec.dilation,
                                   out=out, scratch=tmp)
        else:
            kernels.conv_dense(cur, layer.weights, spec.dilation,
                               out=out, scratch=ws.cols[i], w2=layer.gemm_w)
        if layer.bias is not None:
            out += layer.bias[:, None]
        apply_activation(net.config.activation, out, out=out, tmp=tmp)
        cur = out
    return cur


def forward(net: Network, buf: AudioBuffer) -> AudioBuffer:
    """Evaluate the network on a whole buffer.

    Output has out_channels rows and input.length - RF + 1 samples; the
    sample at output index j is the network's value at input time
    j + RF - 1. Pure function of (net, input).
    """
    x = buf.samples
    if x.shape[0] != net.config.in_channels:
        raise InvalidInputError(
            f"input has {x.shape[0]} channels, network expects "
            f"{net.config.in_channels}")
    if x.shape[1] < net.receptive_field:
        raise InsufficientContextError(
            f"input length {x.shape[1]} is shorter than the receptive field "
            f"{net.receptive_field}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("input contains NaN or Inf")
    ws = Workspace(net, x.shape[1])
    y = forward_into(net, x, ws)
    return AudioBuffer(y.copy(), buf.sample_rate)
