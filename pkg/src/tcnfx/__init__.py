"""Randomly weighted dilated causal conv networks as real-time audio effects.

A network is fully described by a small NetworkConfig; building it is a
pure function of that config (weights come from seeded counter-based
streams), so presets recall effects exactly. StreamEngine runs a built
network block by block with a look-back buffer, making streamed output
sample-exact against offline processing.
"""

from .audio import AudioBuffer, db_to_gain, gain_to_db, pink_noise, rms, white_noise
from .config import (
    ACTIVATIONS,
    INIT_SCHEMES,
    LayerSpec,
    NetworkConfig,
    derive_layer_plan,
    describe_lines,
    param_count,
    receptive_field,
    rf_milliseconds,
)
from .engine import (
    DEFAULT_BLOCK_SIZE,
    CalibrationResult,
    LookbackBuffer,
    StreamEngine,
    calibrate_makeup,
)
from .errors import (
    ConfigTooLargeError,
    ConfigurationError,
    InsufficientContextError,
    InvalidInputError,
    PresetError,
    TcnfxError,
    WavError,
)
from .network import Network, build_network, conv1d_causal, forward
from .presets import (
    DEFAULT_PRESET,
    Preset,
    load_preset,
    parse_preset,
    save_preset,
    serialize_preset,
)
from .wavio import read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "ACTIVATIONS",
    "AudioBuffer",
    "CalibrationResult",
    "ConfigTooLargeError",
    "ConfigurationError",
    "DEFAULT_BLOCK_SIZE",
    "DEFAULT_PRESET",
    "INIT_SCHEMES",
    "InsufficientContextError",
    "InvalidInputError",
    "LayerSpec",
    "LookbackBuffer",
    "Network",
    "NetworkConfig",
    "Preset",
    "PresetError",
    "StreamEngine",
    "TcnfxError",
    "WavError",
    "build_network",
    "calibrate_makeup",
    "conv1d_causal",
    "db_to_gain",
    "derive_layer_plan",
    "describe_lines",
    "forward",
    "gain_to_db",
    "load_preset",
    "param_count",
    "parse_preset",
    "pink_noise",
    "read_wav",
    "receptive_field",
    "rf_milliseconds",
    "rms",
    "save_preset",
    "serialize_preset",
    "white_noise",
    "write_wav",
]
