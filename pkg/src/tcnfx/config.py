"""Network architecture description and the arithmetic derived from it.

Everything in this module is pure integer/str bookkeeping: no tensors are
allocated here. A ``NetworkConfig`` fully determines the network that
``tcnfx.network.build_network`` constructs, including every random weight,
so serializing the config (see ``tcnfx.presets``) is enough to recall an
effect exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigTooLargeError, ConfigurationError

ACTIVATIONS = ("linear", "relu", "tanh", "sigmoid", "softsign", "leaky_relu")
INIT_SCHEMES = ("normal", "uniform", "glorot_uniform", "he_normal")

# Slope of the negative branch of leaky_relu. Fixed, not a user control.
LEAKY_RELU_SLOPE = 0.2

# Default distribution parameters. "normal" is the weight std-dev, "uniform"
# the half-width of the symmetric interval. Chosen to keep a single layer's
# output variance near unity for unit-variance input.
DEFAULT_INIT_PARAM = {"normal": 0.4, "uniform": 1.0}

# Declared bounds for every integer field. The control surface clamps to
# these same values, so keep them in sync with any UI.
MIN_LAYERS, MAX_LAYERS = 1, 32
MIN_KERNEL, MAX_KERNEL = 1, 64
MIN_DILATION_GROWTH, MAX_DILATION_GROWTH = 1, 16
MIN_CHANNEL_WIDTH, MAX_CHANNEL_WIDTH = 1, 64
MIN_IO_CHANNELS, MAX_IO_CHANNELS = 1, 2
MAX_SEED = 2**64 - 1

# A receptive field beyond 2^31 samples is rejected outright.
MAX_RECEPTIVE_FIELD = 2**31


def _check_int(name: str, value, lo: int, hi: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    if not lo <= value <= hi:
        raise ConfigurationError(f"{name} must be in [{lo}, {hi}], got {value}")


@dataclass(frozen=True)
class NetworkConfig:
    """Complete architectural description of a network.

    ``dilation_growth`` is the base of the per-layer dilation schedule:
    layer ``l`` uses dilation ``dilation_growth ** l``. ``seed`` selects
    the weights; two configs differing only in seed share every shape.
    """

    num_layers: int = 3
    kernel_size: int = 3
    dilation_growth: int = 2
    channel_width: int = 8
    in_channels: int = 1
    out_channels: int = 1
    activation: str = "tanh"
    init_scheme: str = "normal"
    init_param: float | None = None
    depthwise: bool = False
    use_bias: bool = False
    seed: int = 0

    def __post_init__(self):
        _check_int("num_layers", self.num_layers, MIN_LAYERS, MAX_LAYERS)
        _check_int("kernel_size", self.kernel_size, MIN_KERNEL, MAX_KERNEL)
        _check_int("dilation_growth", self.dilation_growth,
                   MIN_DILATION_GROWTH, MAX_DILATION_GROWTH)
        _check_int("channel_width", self.channel_width,
                   MIN_CHANNEL_WIDTH, MAX_CHANNEL_WIDTH)
        _check_int("in_channels", self.in_channels,
                   MIN_IO_CHANNELS, MAX_IO_CHANNELS)
        _check_int("out_channels", self.out_channels,
                   MIN_IO_CHANNELS, MAX_IO_CHANNELS)
        _check_int("seed", self.seed, 0, MAX_SEED)
        if self.activation not in ACTIVATIONS:
            raise ConfigurationError(
                f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        if self.init_scheme not in INIT_SCHEMES:
            raise ConfigurationError(
                f"init_scheme must be one of {INIT_SCHEMES}, got {self.init_scheme!r}")
        if self.init_param is not None:
            if self.init_scheme not in DEFAULT_INIT_PARAM:
                raise ConfigurationError(
                    f"init_param is not used by init_scheme {self.init_scheme!r}")
            p = float(self.init_param)
            if not (p >= 0.0 and p == p and p != float("inf")):
                raise ConfigurationError(
                    f"init_param must be finite and >= 0, got {self.init_param!r}")
        if not isinstance(self.depthwise, bool):
            raise ConfigurationError("depthwise must be a bool")
        if not isinstance(self.use_bias, bool):
            raise ConfigurationError("use_bias must be a bool")

    def resolved_init_param(self) -> float:
        """The distribution parameter after applying scheme defaults."""
        if self.init_param is not None:
            return float(self.init_param)
        return DEFAULT_INIT_PARAM.get(self.init_scheme, 0.0)


@dataclass(frozen=True)
class LayerSpec:
    """Shape and placement of one conv+activation block."""

    layer_index: int
    in_ch: int
    out_ch: int
    kernel_size: int
    dilation: int
    depthwise: bool
    bias: bool

    def __post_init__(self):
        if self.depthwise and self.in_ch != self.out_ch:
            raise ConfigurationError(
                f"depthwise layer {self.layer_index} requires in_ch == out_ch, "
                f"got {self.in_ch} != {self.out_ch}")

    @property
    def kernel_span(self) -> int:
        """Input samples covered by one kernel placement."""
        return (self.kernel_size - 1) * self.dilation + 1

    @property
    def weight_shape(self) -> tuple[int, int, int]:
        if self.depthwise:
            return (self.out_ch, 1, self.kernel_size)
        return (self.out_ch, self.in_ch, self.kernel_size)


def receptive_field(config: NetworkConfig) -> int:
    """Number of past input samples that can influence one output sample.

    RF = 1 + (k-1) * sum(g**l for l in 0..L-1). Raises
    ConfigTooLargeError when the result exceeds 2^31 samples.
    """
    L, k, g = config.num_layers, config.kernel_size, config.dilation_growth
    if g == 1:
        rf = 1 + (k - 1) * L
    else:
        rf = 1 + (k - 1) * (g**L - 1) // (g - 1)
    if rf > MAX_RECEPTIVE_FIELD:
        raise ConfigTooLargeError(
            f"receptive field {rf} samples exceeds the {MAX_RECEPTIVE_FIELD} limit")
    return rf


def derive_layer_plan(config: NetworkConfig) -> list[LayerSpec]:
    """Expand a config into per-layer shapes.

    Dense mode routes in_channels -> width -> ... -> width -> out_channels.
    Depthwise mode keeps the entry and exit layers dense (they must change
    the channel count) and makes every hidden layer depthwise.
    """
    L = config.num_layers
    c = config.channel_width
    specs = []
    for l in range(L):
        in_ch = config.in_channels if l == 0 else c
        out_ch = config.out_channels if l == L - 1 else c
        # Entry/exit layers stay dense even in depthwise mode.
        dw = config.depthwise and 0 < l < L - 1
        specs.append(LayerSpec(
            layer_index=l,
            in_ch=in_ch,
            out_ch=out_ch,
            kernel_size=config.kernel_size,
            dilation=config.dilation_growth**l,
            depthwise=dw,
            bias=config.use_bias,
        ))
    return specs


def param_count(config: NetworkConfig) -> int:
    """Total scalar parameters allocated by build_network."""
    total = 0
    for spec in derive_layer_plan(config):
        if spec.depthwise:
            total += spec.out_ch * spec.kernel_size
        else:
            total += spec.in_ch * spec.out_ch * spec.kernel_size
        if spec.bias:
            total += spec.out_ch
    return total


def rf_milliseconds(rf_samples: int, sample_rate: int) -> float:
    return rf_samples / sample_rate * 1000.0


def format_rf_ms(rf_samples: int, sample_rate: int) -> str:
    """Canonical display string for the receptive field in milliseconds.

    The control surface shows this string verbatim (it is echoed over the
    bridge), so there is exactly one formatting rule in the project.
    """
    return f"{rf_milliseconds(rf_samples, sample_rate):.1f}"


def describe_lines(config: NetworkConfig, sample_rate: int = 44100) -> list[str]:
    """Human-readable architecture summary, one string per line."""
    rf = receptive_field(config)
    lines = [
        f"receptive field: {rf} samples ({format_rf_ms(rf, sample_rate)} ms at {sample_rate} Hz)",
        f"parameters: {param_count(config)}",
        f"seed: {config.seed}",
        "layer   in  out  kernel  dilation  depthwise",
    ]
    for spec in derive_layer_plan(config):
        lines.append(
            f"{spec.layer_index:5d} {spec.in_ch:4d} {spec.out_ch:4d} "
            f"{spec.kernel_size:7d} {spec.dilation:9d} {'yes' if spec.depthwise else 'no':>10s}")
    return lines
